#include "nnhankel/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "nnhankel/experiments.hpp"
#include "nnhankel/io.hpp"
#include "nnhankel/pipeline.hpp"

namespace nnh {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitInvalidEigenpair = 3;
constexpr int kExitNoConvergence = 4;
constexpr int kExitVerifyFailed = 5;

int cmd_solve(const std::string& input, const std::string& output, double tol, bool no_tiebreak) {
    Instance inst{HankelGenerator(Eigen::VectorXd::Zero(1)), {}};
    try {
        inst = load_instance(input);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    }

    SolverConfig cfg;
    cfg.tol_feas = tol;
    cfg.tol_kkt = tol;
    cfg.stage_b_tiebreak = !no_tiebreak;

    SolveResult result;
    try {
        result = nearest_nonneg_hankel(inst.h, inst.pair, cfg);
    } catch (const InvalidEigenpairError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidEigenpair;
    } catch (const MaxIterationsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    }

    const std::string out_path =
        output.empty()
            ? std::filesystem::path(input).replace_extension(".result.json").string()
            : output;
    save_result(out_path, result);

    std::printf("stage:         %s\n", to_string(result.stage).c_str());
    std::printf("frob_norm:     %.10g\n", result.frob_norm);
    std::printf("eig_residual:  %.10g\n", result.eig_residual);
    std::printf("wall_seconds:  %.3g\n", result.wall_seconds);
    std::printf("result file:   %s\n", out_path.c_str());
    return kExitOk;
}

int cmd_check(const std::string& instance_path, const std::string& result_path) {
    std::optional<Instance> inst;
    std::optional<SolveResult> result;
    try {
        inst = load_instance(instance_path);
        result = load_result(result_path);
        if (result->delta_generator.size() != inst->h.coeffs().size()) {
            throw ParseError("instance and result describe different dimensions");
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    }

    const VerificationReport rep = verify_solution(inst->h, *result, inst->pair);
    std::printf("min entry:              %.10g\n", rep.min_entry);
    std::printf("hankel exact:           %s\n", rep.hankel_exact ? "yes" : "no");
    std::printf("recomputed eig_residual: %.10g (%s)\n", rep.recomputed_eig_residual,
                rep.eig_residual_mismatch ? "MISMATCH" : "ok");
    std::printf("recomputed frob_norm:    %.10g (%s)\n", rep.recomputed_frob_norm,
                rep.frob_norm_mismatch ? "MISMATCH" : "ok");
    std::printf("generator sum:          %s\n", rep.generator_sum_mismatch ? "MISMATCH" : "ok");
    if (!rep.passed()) {
        std::printf("verification FAILED\n");
        return kExitVerifyFailed;
    }
    std::printf("verification passed\n");
    return kExitOk;
}

int cmd_gen(int n, std::uint64_t seed, const std::string& mode_name, const std::string& output) {
    if (n < 1) {
        std::cerr << "error: --n must be >= 1\n";
        return kExitParse;
    }
    InstanceMode mode;
    if (mode_name == "planted") {
        mode = InstanceMode::Planted;
    } else if (mode_name == "arbitrary") {
        mode = InstanceMode::Arbitrary;
    } else {
        std::cerr << "error: --mode must be planted or arbitrary\n";
        return kExitParse;
    }
    const TrialInstance inst = make_trial_instance(n, mode, seed);
    save_instance(output, Instance{inst.h, inst.pair});
    std::printf("wrote %s (n=%d, mode=%s, seed=%llu)\n", output.c_str(), n, mode_name.c_str(),
                static_cast<unsigned long long>(seed));
    return kExitOk;
}

bool parse_size_range(const std::string& text, std::vector<int>& sizes) {
    int a = 0, b = 0, step = 0;
    if (std::sscanf(text.c_str(), "%d:%d:%d", &a, &b, &step) != 3) return false;
    if (a < 1 || step < 1 || b < a) return false;
    for (int n = a; n <= b; n += step) sizes.push_back(n);
    return !sizes.empty();
}

int cmd_bench(const std::string& sizes_text, int trials, std::uint64_t seed,
              double planted_fraction, const std::string& csv_path, int workers) {
    SweepConfig cfg;
    cfg.sizes.clear();
    if (!parse_size_range(sizes_text, cfg.sizes)) {
        std::cerr << "error: --sizes must be a:b:step with a <= b, step >= 1\n";
        return kExitParse;
    }
    if (trials < 1 || planted_fraction < 0.0 || planted_fraction > 1.0 || workers < 1) {
        std::cerr << "error: bad bench flags\n";
        return kExitParse;
    }
    cfg.trials_per_size = trials;
    cfg.base_seed = seed;
    cfg.planted_fraction = planted_fraction;
    cfg.workers = workers;

    // Per-trial seeds depend only on (base_seed, n, trial), so running the
    // sweep one size at a time composes exactly and leaves completed sizes
    // in the CSV if a later solve fails.
    const std::vector<int> all_sizes = cfg.sizes;
    std::vector<TrialRecord> records;
    try {
        for (int n : all_sizes) {
            cfg.sizes = {n};
            std::vector<TrialRecord> batch = run_sweep(cfg);
            records.insert(records.end(), batch.begin(), batch.end());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: sweep failed: " << e.what() << '\n';
        std::ofstream out(csv_path);
        if (out) {
            write_csv(out, records);
            std::cerr << "note: partial CSV (" << records.size() << " records) flushed to "
                      << csv_path << '\n';
        }
        return kExitNoConvergence;
    }
    std::ofstream out(csv_path);
    if (!out) {
        std::cerr << "error: cannot write " << csv_path << '\n';
        return kExitParse;
    }
    write_csv(out, records);
    print_summary(std::cout, summarize(records));
    std::printf("wrote %zu records to %s\n", records.size(), csv_path.c_str());
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Nearest entrywise-nonnegative Hankel matrix with a prescribed eigenpair"};
    app.require_subcommand(1);

    // solve
    std::string solve_input, solve_output;
    double solve_tol = 1e-8;
    bool no_tiebreak = false;
    CLI::App* solve = app.add_subcommand("solve", "solve one instance file");
    solve->add_option("input", solve_input, "instance JSON file")->required();
    solve->add_option("--tol", solve_tol, "feasibility/KKT tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--output", solve_output, "result JSON path (default: <input>.result.json)");
    solve->add_flag("--no-tiebreak", no_tiebreak, "skip the minimal-norm tie-break in stage B");

    // check
    std::string check_instance, check_result;
    CLI::App* check = app.add_subcommand("check", "verify a result file against its instance");
    check->add_option("instance", check_instance, "instance JSON file")->required();
    check->add_option("result", check_result, "result JSON file")->required();

    // gen
    int gen_n = 0;
    std::uint64_t gen_seed = 1;
    std::string gen_mode = "planted", gen_output;
    CLI::App* gen = app.add_subcommand("gen", "generate a deterministic instance");
    gen->add_option("--n", gen_n, "matrix dimension")->required();
    gen->add_option("--seed", gen_seed, "64-bit seed");
    gen->add_option("--mode", gen_mode, "planted|arbitrary");
    gen->add_option("--output", gen_output, "output path")->required();

    // bench
    std::string bench_sizes = "10:100:10", bench_csv = "bench.csv";
    int bench_trials = 10, bench_workers = 1;
    std::uint64_t bench_seed = 1;
    double bench_planted = 0.5;
    CLI::App* bench = app.add_subcommand("bench", "run the size sweep and write a CSV");
    bench->add_option("--sizes", bench_sizes, "size range a:b:step");
    bench->add_option("--trials", bench_trials, "trials per size");
    bench->add_option("--seed", bench_seed, "base seed");
    bench->add_option("--planted-fraction", bench_planted, "fraction of planted trials");
    bench->add_option("--csv", bench_csv, "CSV output path");
    bench->add_option("--workers", bench_workers, "worker threads");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_input, solve_output, solve_tol, no_tiebreak);
        if (check->parsed()) return cmd_check(check_instance, check_result);
        if (gen->parsed()) return cmd_gen(gen_n, gen_seed, gen_mode, gen_output);
        return cmd_bench(bench_sizes, bench_trials, bench_seed, bench_planted, bench_csv,
                         bench_workers);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace nnh
