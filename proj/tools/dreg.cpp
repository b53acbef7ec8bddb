// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
//
// dreg - diffeomorphic 3-D registration command line tool.
//
// Subcommands: register, warp, evaluate, jacobian, synth.
// Exit codes: 0 success, 2 argument error, 3 I/O error, 4 numerical failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dreg/errors.hpp"
#include "dreg/io.hpp"
#include "dreg/metrics.hpp"
#include "dreg/parallel.hpp"
#include "dreg/registration.hpp"
#include "dreg/synth.hpp"
#include "dreg/volume.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::string format6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct RegisterArgs {
    std::string target;
    std::string source;
    std::string out;
    std::string warped;
    std::string data_term = "l1";
    int order = 2;
    double lambda = -1.0;
    double theta = -1.0;
    int levels = 3;
    std::string profile = "capped";
    double tol = -1.0;
    std::string report;
    std::string target_labels;
    std::string source_labels;
};

struct WarpArgs {
    std::string input;
    std::string phi;
    std::string out;
    bool labels = false;
};

struct EvaluateArgs {
    std::string a;
    std::string b;
    std::vector<int> labels;
};

struct JacobianArgs {
    std::string phi;
};

struct SynthArgs {
    std::string kase;
    std::vector<int> dims;
    std::string out_prefix;
    std::vector<double> shift = {3.0, 0.0, 0.0};
    std::uint32_t seed = 1;
    double noise = 0.0;
};

std::set<int> label_set(const dreg::LabelVolume& lbl) {
    std::set<int> out;
    for (auto v : lbl.labels) {
        if (v != 0) {
            out.insert(v);
        }
    }
    return out;
}

int run_register(const RegisterArgs& args) {
    if (args.lambda < 0.0) {
        throw std::invalid_argument("--lambda must be >= 0");
    }
    if (args.theta <= 0.0) {
        throw std::invalid_argument("--theta must be > 0");
    }

    dreg::SolverConfig solver;
    solver.data_term = args.data_term == "l1" ? 1 : 2;
    solver.order = args.order;
    solver.lambda = args.lambda;
    solver.theta = args.theta;
    if (args.tol >= 0.0) {
        solver.tol = args.tol;
    }
    const auto profile =
        args.profile == "capped" ? dreg::Profile::capped : dreg::Profile::converged;
    const auto cfg = dreg::make_registration_config(profile, solver, args.levels);

    const dreg::ScalarVolume target = dreg::read_scalar(args.target);
    const dreg::ScalarVolume source = dreg::read_scalar(args.source);

    const dreg::RegistrationResult result = dreg::register_pair(target, source, cfg);
    dreg::write_volume(args.out, result.phi);
    if (!args.warped.empty()) {
        dreg::write_volume(args.warped, result.warped);
    }

    if (!args.report.empty()) {
        dreg::RunReport report;
        report.runtime_seconds = result.elapsed_seconds;
        report.velocity_count = result.velocity_count;
        report.jacobian_pct_nonpositive = dreg::jacobian_stats(result.phi).pct_nonpositive;
        if (!args.target_labels.empty() && !args.source_labels.empty()) {
            const dreg::LabelVolume target_lbl = dreg::read_label(args.target_labels);
            const dreg::LabelVolume source_lbl = dreg::read_label(args.source_labels);
            const dreg::LabelVolume warped_lbl = dreg::warp_labels(source_lbl, result.phi);
            for (int label : label_set(target_lbl)) {
                report.dice[label] = dreg::dice(warped_lbl, target_lbl, label);
                report.hausdorff_mm[label] =
                    dreg::hausdorff_slice_avg(warped_lbl, target_lbl, label);
            }
        }
        report.config = {args.data_term,
                         args.order,
                         args.lambda,
                         args.theta,
                         cfg.levels,
                         args.profile,
                         cfg.solver.tol,
                         cfg.warp_improvement_threshold,
                         cfg.solver.epsilon,
                         dreg::thread_count()};
        dreg::write_report(args.report, report);
    }
    return kExitOk;
}

int run_warp(const WarpArgs& args) {
    const dreg::DeformationField phi = dreg::read_deformation(args.phi);
    if (args.labels) {
        const dreg::LabelVolume lbl = dreg::read_label(args.input);
        dreg::write_volume(args.out, dreg::warp_labels(lbl, phi));
    } else {
        const dreg::ScalarVolume img = dreg::read_scalar(args.input);
        dreg::write_volume(args.out, dreg::warp_image(img, phi));
    }
    return kExitOk;
}

int run_evaluate(const EvaluateArgs& args) {
    const dreg::LabelVolume a = dreg::read_label(args.a);
    const dreg::LabelVolume b = dreg::read_label(args.b);
    for (int label : args.labels) {
        const double d = dreg::dice(a, b, label);
        double h = 0.0;
        try {
            h = dreg::hausdorff_slice_avg(a, b, label);
        } catch (const std::invalid_argument&) {
            // no slice carries the label in both volumes
            std::cout << "label " << label << " dice " << format6(d) << " hausdorff_mm nan\n";
            continue;
        }
        std::cout << "label " << label << " dice " << format6(d) << " hausdorff_mm "
                  << format6(h) << "\n";
    }
    return kExitOk;
}

int run_jacobian(const JacobianArgs& args) {
    const dreg::DeformationField phi = dreg::read_deformation(args.phi);
    const dreg::JacobianStats stats = dreg::jacobian_stats(phi);
    std::cout << "pct_nonpositive " << format6(stats.pct_nonpositive) << " min_det "
              << format6(stats.min_det) << "\n";
    return kExitOk;
}

int run_synth(const SynthArgs& args) {
    const dreg::Dims3 dims{args.dims[0], args.dims[1], args.dims[2]};
    dreg::SynthPair pair;
    if (args.kase == "translate") {
        pair = dreg::make_translate_case(dims, {args.shift[0], args.shift[1], args.shift[2]});
    } else if (args.kase == "blob") {
        pair = dreg::make_random_smooth_case(dims, args.seed);
    } else {
        pair = dreg::make_sphere_ellipsoid_case(dims);
    }
    if (args.noise > 0.0) {
        dreg::add_salt_pepper(pair.source, args.noise, args.seed + 17);
    }
    const std::string prefix = args.out_prefix;
    dreg::write_volume(prefix + "_target.dreg", pair.target);
    dreg::write_volume(prefix + "_source.dreg", pair.source);
    dreg::write_volume(prefix + "_target_labels.dreg", pair.target_labels);
    dreg::write_volume(prefix + "_source_labels.dreg", pair.source_labels);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dreg: diffeomorphic 3-D image registration"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = 1;
    app.add_option("--threads", threads, "Worker threads (1 = bit-reproducible baseline)")
        ->check(CLI::Range(1, 256));

    RegisterArgs reg;
    auto* reg_cmd = app.add_subcommand("register", "Register a source volume onto a target");
    reg_cmd->add_option("--target", reg.target, "Target volume (DREG file)")->required();
    reg_cmd->add_option("--source", reg.source, "Source volume (DREG file)")->required();
    reg_cmd->add_option("--out", reg.out, "Output deformation field")->required();
    reg_cmd->add_option("--warped", reg.warped, "Optional warped source output");
    reg_cmd->add_option("--data-term", reg.data_term, "Data term")
        ->check(CLI::IsMember({"l1", "l2"}));
    reg_cmd->add_option("--order", reg.order, "Regulariser order")->check(CLI::Range(1, 3));
    reg_cmd->add_option("--lambda", reg.lambda, "Regularisation weight")->required();
    reg_cmd->add_option("--theta", reg.theta, "Penalty parameter")->required();
    reg_cmd->add_option("--levels", reg.levels, "Pyramid levels")->check(CLI::Range(1, 6));
    reg_cmd->add_option("--profile", reg.profile, "Iteration profile")
        ->check(CLI::IsMember({"capped", "converged"}));
    reg_cmd->add_option("--tol", reg.tol, "Solver convergence threshold")
        ->check(CLI::NonNegativeNumber);
    reg_cmd->add_option("--seed-report", reg.report, "Write a JSON run report here");
    reg_cmd->add_option("--target-labels", reg.target_labels,
                        "Target labels for report metrics");
    reg_cmd->add_option("--source-labels", reg.source_labels,
                        "Source labels for report metrics");

    WarpArgs warp;
    auto* warp_cmd = app.add_subcommand("warp", "Apply a deformation field to a volume");
    warp_cmd->add_option("--in", warp.input, "Input volume")->required();
    warp_cmd->add_option("--phi", warp.phi, "Deformation field")->required();
    warp_cmd->add_option("--out", warp.out, "Output volume")->required();
    warp_cmd->add_flag("--labels", warp.labels, "Treat the input as labels (nearest neighbour)");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Dice and Hausdorff between label volumes");
    eval_cmd->add_option("--a", eval.a, "First label volume")->required();
    eval_cmd->add_option("--b", eval.b, "Second label volume")->required();
    eval_cmd->add_option("--labels", eval.labels, "Labels to evaluate")
        ->required()
        ->delimiter(',');

    JacobianArgs jac;
    auto* jac_cmd = app.add_subcommand("jacobian", "Jacobian statistics of a deformation");
    jac_cmd->add_option("--phi", jac.phi, "Deformation field")->required();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic registration pair");
    synth_cmd->add_option("--case", synth.kase, "Synthetic case")
        ->required()
        ->check(CLI::IsMember({"translate", "blob", "sphere-ellipsoid"}));
    synth_cmd->add_option("--dims", synth.dims, "Grid dims M,N,H")
        ->required()
        ->delimiter(',')
        ->expected(3);
    synth_cmd->add_option("--out-prefix", synth.out_prefix, "Output file prefix")->required();
    synth_cmd->add_option("--shift", synth.shift, "Translate case shift (voxels)")
        ->delimiter(',')
        ->expected(3);
    synth_cmd->add_option("--seed", synth.seed, "Seed for the blob case and noise");
    synth_cmd->add_option("--noise", synth.noise, "Salt-and-pepper fraction on the source")
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "dreg: argument-error: " << e.what() << "\n";
        return kExitArgument;
    }

    dreg::set_thread_count(threads);

    try {
        if (reg_cmd->parsed()) {
            return run_register(reg);
        }
        if (warp_cmd->parsed()) {
            return run_warp(warp);
        }
        if (eval_cmd->parsed()) {
            return run_evaluate(eval);
        }
        if (jac_cmd->parsed()) {
            return run_jacobian(jac);
        }
        if (synth_cmd->parsed()) {
            return run_synth(synth);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "dreg: argument-error: " << e.what() << "\n";
        return kExitArgument;
    } catch (const dreg::io_error& e) {
        std::cerr << "dreg: io-error: " << e.what() << "\n";
        return kExitIo;
    } catch (const dreg::numeric_error& e) {
        std::cerr << "dreg: numeric-error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "dreg: error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitArgument;
}
