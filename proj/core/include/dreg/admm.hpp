// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <vector>

#include "dreg/regularizer.hpp"
#include "dreg/volume.hpp"

namespace dreg {

/// Parameters of one velocity solve: the data-term exponent s, regulariser order n
/// and weight lambda, the splitting penalty theta, and the stopping rule.
struct SolverConfig {
    int data_term = 1;        // s: 1 = sum of absolute differences, 2 = sum of squares
    int order = 2;            // n: regulariser derivative order, 1..6
    double lambda = 0.0;      // regularisation weight, >= 0
    double theta = 0.1;       // penalty coupling the split variables, > 0
    double epsilon = 1e-6;    // guards division by |grad|^2 in the s=1 update, > 0
    int max_iters = 100;
    double tol = 0.0;         // stop when mean per-entry |v_k - v_{k-1}| <= tol; 0 runs to the cap
    bool accelerate = true;   // momentum extrapolation of w and the dual variable
    bool log_objective = true;
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const SolverConfig& cfg);

struct SolverDiagnostics {
    int iterations = 0;
    double final_change = 0.0;
    bool converged = false;
    std::vector<double> objective;            // model objective per iteration (when logged)
    std::vector<double> constraint_residual;  // ||v - w||_2 per iteration
};

struct SolveResult {
    VectorField velocity;
    SolverDiagnostics diagnostics;
};

/// alpha_{k+1} = (1 + sqrt(1 + 4 alpha_k^2)) / 2; strictly increasing from alpha_0 = 1.
double nesterov_next_alpha(double alpha);

/// Point-wise closed-form solution of the s=1 subproblem
///   min_v ||rho(v)||_1 + theta/2 ||w_hat - v - b_hat||^2,
/// rho(u) = <grad, u> + warped_source - target:
///   zhat = theta * rho(w_hat - b_hat) / (|grad|^2 + epsilon)
///   v = w_hat - b_hat - (zhat / max(|zhat|, 1)) * grad / theta.
VectorField v_update_l1(const ScalarVolume& target, const ScalarVolume& warped_source,
                        const VectorField& grad, const VectorField& w_hat,
                        const VectorField& b_hat, const SolverConfig& cfg);

/// Point-wise rank-one solve of the s=2 subproblem normal equation
///   (g g^T + theta I) v = theta (w_hat - b_hat) - g (warped_source - target)
/// via the Sherman-Morrison identity: v = r/theta - g (g.r) / (theta (theta + |g|^2)).
VectorField v_update_l2(const ScalarVolume& target, const ScalarVolume& warped_source,
                        const VectorField& grad, const VectorField& w_hat,
                        const VectorField& b_hat, const SolverConfig& cfg);

/// Spectral solve of the smoothing subproblem normal equation
/// (lambda K + theta I) w = theta (v + b_hat), applied independently per component:
///   w = IDFT( theta * DFT(v + b_hat) / (lambda * symbol + theta) ).
/// The kernel must be built with cfg.order on the field dims.
VectorField w_update(const VectorField& v, const VectorField& b_hat,
                     const SpectralKernel& kernel, const SolverConfig& cfg);

/// Data fidelity at v: sum |rho| for s=1, 0.5 * sum rho^2 for s=2.
double data_term_value(const ScalarVolume& target, const ScalarVolume& warped_source,
                       const VectorField& grad, const VectorField& v, int s);

/// Runs the accelerated splitting loop for one velocity field:
/// v-update (dispatch on s), w-update, dual update b = b_hat + v - w, momentum
/// step on both w and b. Starts from zero fields with alpha = 1; the first
/// extrapolation coefficient is therefore 0. Stops at cfg.max_iters or when the
/// mean per-entry change of v drops to cfg.tol.
SolveResult solve_velocity(const ScalarVolume& target, const ScalarVolume& warped_source,
                           const SolverConfig& cfg);

}  // namespace dreg
