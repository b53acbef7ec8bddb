// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/admm.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dreg/errors.hpp"
#include "dreg/fft.hpp"
#include "dreg/parallel.hpp"

namespace dreg {

namespace {

void check_dims(const Dims3& a, const Dims3& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

// v-subproblem, s = 1: shrinkage along the image gradient direction.
void v_update_l1_into(const ScalarVolume& target, const ScalarVolume& warped_source,
                      const VectorField& grad, const VectorField& w_hat,
                      const VectorField& b_hat, const SolverConfig& cfg, VectorField& out) {
    const std::int64_t voxels = static_cast<std::int64_t>(target.dims.voxels());
    const double theta = cfg.theta;
    const double eps = cfg.epsilon;

    parallel_for(0, voxels, [&](std::int64_t i0, std::int64_t i1) {
        for (std::int64_t i = i0; i < i1; ++i) {
            const auto vi = static_cast<std::size_t>(i);
            const Vec3 g = grad.get(vi);
            const Vec3 u = w_hat.get(vi) - b_hat.get(vi);
            const double residual = g.dot(u) + static_cast<double>(warped_source.data[vi]) -
                                    static_cast<double>(target.data[vi]);
            const double zhat = theta * residual / (g.squared_norm() + eps);
            const double clip = zhat / std::max(std::abs(zhat), 1.0);
            out.set(vi, u - (clip / theta) * g);
        }
    });
}

// v-subproblem, s = 2: rank-one Sherman-Morrison solve of (g g^T + theta I) v = rhs.
void v_update_l2_into(const ScalarVolume& target, const ScalarVolume& warped_source,
                      const VectorField& grad, const VectorField& w_hat,
                      const VectorField& b_hat, const SolverConfig& cfg, VectorField& out) {
    const std::int64_t voxels = static_cast<std::int64_t>(target.dims.voxels());
    const double theta = cfg.theta;

    parallel_for(0, voxels, [&](std::int64_t i0, std::int64_t i1) {
        for (std::int64_t i = i0; i < i1; ++i) {
            const auto vi = static_cast<std::size_t>(i);
            const Vec3 g = grad.get(vi);
            const Vec3 u = w_hat.get(vi) - b_hat.get(vi);
            const double diff = static_cast<double>(warped_source.data[vi]) -
                                static_cast<double>(target.data[vi]);
            const Vec3 rhs = theta * u - diff * g;
            const double gg = g.squared_norm();
            out.set(vi, (1.0 / theta) * rhs - (g.dot(rhs) / (theta * (theta + gg))) * g);
        }
    });
}

// w-subproblem: diagonal solve in the frequency domain, one component at a time.
void w_update_into(const VectorField& v, const VectorField& b_hat,
                   const SpectralKernel& kernel, const SolverConfig& cfg, Fft3& fft,
                   VectorField& out) {
    const Dims3 dims = v.dims;
    const std::size_t voxels = dims.voxels();
    const double inv_count = 1.0 / static_cast<double>(voxels);
    const int half = dims.x / 2;

    for (int c = 0; c < 3; ++c) {
        double* real = fft.real();
        const auto ci = static_cast<std::size_t>(c);
        for (std::size_t i = 0; i < voxels; ++i) {
            real[i] = static_cast<double>(v.data[3 * i + ci]) +
                      static_cast<double>(b_hat.data[3 * i + ci]);
        }
        fft.forward();
        std::complex<double>* spec = fft.spectrum();
        std::size_t b = 0;
        for (int r = 0; r < dims.z; ++r) {
            for (int q = 0; q < dims.y; ++q) {
                const double* krow =
                    kernel.values.data() + static_cast<std::size_t>(dims.x) *
                                               (static_cast<std::size_t>(q) +
                                                static_cast<std::size_t>(dims.y) *
                                                    static_cast<std::size_t>(r));
                for (int p = 0; p <= half; ++p, ++b) {
                    spec[b] *= cfg.theta / (cfg.lambda * krow[p] + cfg.theta) * inv_count;
                }
            }
        }
        fft.inverse();
        for (std::size_t i = 0; i < voxels; ++i) {
            out.data[3 * i + ci] = static_cast<float>(real[i]);
        }
    }
}

double spectral_energy(const VectorField& w, const SpectralKernel& kernel, Fft3& fft) {
    const Dims3 dims = w.dims;
    const std::size_t voxels = dims.voxels();
    const int half = dims.x / 2;
    double energy = 0.0;
    for (int c = 0; c < 3; ++c) {
        double* real = fft.real();
        const auto ci = static_cast<std::size_t>(c);
        for (std::size_t i = 0; i < voxels; ++i) {
            real[i] = w.data[3 * i + ci];
        }
        fft.forward();
        const std::complex<double>* spec = fft.spectrum();
        for (int r = 0; r < dims.z; ++r) {
            for (int q = 0; q < dims.y; ++q) {
                for (int p = 0; p <= half; ++p) {
                    const bool self_conjugate = (p == 0) || (2 * p == dims.x);
                    energy += (self_conjugate ? 1.0 : 2.0) * kernel.at(p, q, r) *
                              std::norm(spec[fft.bin(p, q, r)]);
                }
            }
        }
    }
    return 0.5 * energy / static_cast<double>(voxels);
}

// out = a + scale * (a - b), the momentum extrapolation.
void extrapolate(const VectorField& a, const VectorField& b, double scale, VectorField& out) {
    const std::int64_t n = static_cast<std::int64_t>(a.data.size());
    parallel_for(0, n, [&](std::int64_t i0, std::int64_t i1) {
        for (std::int64_t i = i0; i < i1; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double av = a.data[k];
            out.data[k] = static_cast<float>(av + scale * (av - static_cast<double>(b.data[k])));
        }
    });
}

// out = b_hat + v - w, the dual ascent step.
void dual_update(const VectorField& b_hat, const VectorField& v, const VectorField& w,
                 VectorField& out) {
    const std::int64_t n = static_cast<std::int64_t>(v.data.size());
    parallel_for(0, n, [&](std::int64_t i0, std::int64_t i1) {
        for (std::int64_t i = i0; i < i1; ++i) {
            const auto k = static_cast<std::size_t>(i);
            out.data[k] = static_cast<float>(static_cast<double>(b_hat.data[k]) +
                                             static_cast<double>(v.data[k]) -
                                             static_cast<double>(w.data[k]));
        }
    });
}

double mean_abs_difference(const VectorField& a, const VectorField& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        sum += std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]));
    }
    return sum / static_cast<double>(a.data.size());
}

double l2_difference(const VectorField& a, const VectorField& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

void validate(const SolverConfig& cfg) {
    if (cfg.data_term != 1 && cfg.data_term != 2) {
        throw std::invalid_argument("solver: data term exponent must be 1 or 2");
    }
    if (cfg.order < 1 || cfg.order > 6) {
        throw std::invalid_argument("solver: regulariser order must be in [1, 6]");
    }
    if (!(cfg.lambda >= 0.0)) {
        throw std::invalid_argument("solver: lambda must be >= 0");
    }
    if (!(cfg.theta > 0.0)) {
        throw std::invalid_argument("solver: theta must be > 0");
    }
    if (!(cfg.epsilon > 0.0)) {
        throw std::invalid_argument("solver: epsilon must be > 0");
    }
    if (cfg.max_iters < 1) {
        throw std::invalid_argument("solver: max_iters must be >= 1");
    }
    if (!(cfg.tol >= 0.0)) {
        throw std::invalid_argument("solver: tol must be >= 0");
    }
}

double nesterov_next_alpha(double alpha) {
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha));
}

VectorField v_update_l1(const ScalarVolume& target, const ScalarVolume& warped_source,
                        const VectorField& grad, const VectorField& w_hat,
                        const VectorField& b_hat, const SolverConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) {
        throw std::invalid_argument("v_update_l1: epsilon must be > 0");
    }
    check_dims(target.dims, warped_source.dims, "v_update_l1");
    check_dims(target.dims, grad.dims, "v_update_l1");
    check_dims(target.dims, w_hat.dims, "v_update_l1");
    check_dims(target.dims, b_hat.dims, "v_update_l1");
    VectorField out(target.dims, target.spacing);
    v_update_l1_into(target, warped_source, grad, w_hat, b_hat, cfg, out);
    return out;
}

VectorField v_update_l2(const ScalarVolume& target, const ScalarVolume& warped_source,
                        const VectorField& grad, const VectorField& w_hat,
                        const VectorField& b_hat, const SolverConfig& cfg) {
    check_dims(target.dims, warped_source.dims, "v_update_l2");
    check_dims(target.dims, grad.dims, "v_update_l2");
    check_dims(target.dims, w_hat.dims, "v_update_l2");
    check_dims(target.dims, b_hat.dims, "v_update_l2");
    VectorField out(target.dims, target.spacing);
    v_update_l2_into(target, warped_source, grad, w_hat, b_hat, cfg, out);
    return out;
}

VectorField w_update(const VectorField& v, const VectorField& b_hat,
                     const SpectralKernel& kernel, const SolverConfig& cfg) {
    check_dims(v.dims, b_hat.dims, "w_update");
    check_dims(v.dims, kernel.dims, "w_update: kernel");
    Fft3 fft(v.dims);
    VectorField out(v.dims, v.spacing);
    w_update_into(v, b_hat, kernel, cfg, fft, out);
    return out;
}

double data_term_value(const ScalarVolume& target, const ScalarVolume& warped_source,
                       const VectorField& grad, const VectorField& v, int s) {
    const std::size_t voxels = target.dims.voxels();
    double sum = 0.0;
    for (std::size_t i = 0; i < voxels; ++i) {
        const double rho = grad.get(i).dot(v.get(i)) +
                           static_cast<double>(warped_source.data[i]) -
                           static_cast<double>(target.data[i]);
        sum += (s == 1) ? std::abs(rho) : 0.5 * rho * rho;
    }
    return sum;
}

SolveResult solve_velocity(const ScalarVolume& target, const ScalarVolume& warped_source,
                           const SolverConfig& cfg) {
    validate(cfg);
    check_dims(target.dims, warped_source.dims, "solve_velocity");
    const Dims3 dims = target.dims;
    const Spacing3 spacing = target.spacing;

    const VectorField grad = image_gradient(warped_source);
    const SpectralKernel kernel = laplacian_symbol(cfg.order, dims);
    Fft3 fft(dims);

    VectorField v(dims, spacing);
    VectorField v_next(dims, spacing);
    VectorField w(dims, spacing);
    VectorField w_prev(dims, spacing);
    VectorField b(dims, spacing);
    VectorField b_prev(dims, spacing);
    VectorField w_hat(dims, spacing);
    VectorField b_hat(dims, spacing);

    SolverDiagnostics diag;
    double alpha = 1.0;

    for (int k = 0; k < cfg.max_iters; ++k) {
        if (cfg.data_term == 1) {
            v_update_l1_into(target, warped_source, grad, w_hat, b_hat, cfg, v_next);
        } else {
            v_update_l2_into(target, warped_source, grad, w_hat, b_hat, cfg, v_next);
        }
        const double change = mean_abs_difference(v_next, v);  // v still holds the previous iterate
        std::swap(v, v_next);

        w_update_into(v, b_hat, kernel, cfg, fft, w);
        dual_update(b_hat, v, w, b);

        diag.constraint_residual.push_back(l2_difference(v, w));
        if (cfg.log_objective) {
            diag.objective.push_back(data_term_value(target, warped_source, grad, v,
                                                     cfg.data_term) +
                                     cfg.lambda * spectral_energy(v, kernel, fft));
        }

        const double alpha_next = nesterov_next_alpha(alpha);
        const double coef = cfg.accelerate ? (alpha - 1.0) / alpha_next : 0.0;
        extrapolate(w, w_prev, coef, w_hat);
        extrapolate(b, b_prev, coef, b_hat);
        std::swap(w_prev, w);
        std::swap(b_prev, b);
        alpha = alpha_next;

        diag.iterations = k + 1;
        diag.final_change = change;
        if (change <= cfg.tol) {
            diag.converged = true;
            break;
        }
    }

    if (!all_finite(v)) {
        throw numeric_error("solve_velocity: velocity field contains non-finite values");
    }
    return {std::move(v), std::move(diag)};
}

}  // namespace dreg
