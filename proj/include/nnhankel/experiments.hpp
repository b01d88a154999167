#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nnhankel/pipeline.hpp"

namespace nnh {

enum class InstanceMode { Planted, Arbitrary };

std::string to_string(InstanceMode mode);   // "planted" / "arbitrary"
std::string to_string(Stage stage);         // "A" / "B"

struct TrialRecord {
    int n = 0;
    int trial = 0;
    InstanceMode mode = InstanceMode::Planted;
    Stage stage = Stage::ExactA;
    double eig_residual = 0.0;
    double frob_norm = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;  // reproduces the instance bit-exactly
};

struct SweepConfig {
    std::vector<int> sizes = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    int trials_per_size = 10;
    std::uint64_t base_seed = 1;
    double planted_fraction = 0.5;
    int workers = 1;  // records are identical for any worker count
};

/// Generator entries i.i.d. standard normal from the counter-based stream.
HankelGenerator gen_random_hankel(int n, std::uint64_t seed);

/// Planted mode: a true eigenpair (uniformly chosen index) of a freshly
/// sampled nonnegative Hankel matrix, so the exact stage is feasible once
/// the sweep shifts the input accordingly. Arbitrary mode: an entrywise
/// nonnegative unit vector with a negative eigenvalue, which no nonnegative
/// matrix can realize.
Eigenpair gen_candidate_eigenpair(const HankelGenerator& g, InstanceMode mode, std::uint64_t seed);

struct TrialInstance {
    HankelGenerator h;
    Eigenpair pair;
    // Weighted Frobenius norm of the planted shift (upper bound on the
    // optimal perturbation); empty in arbitrary mode.
    std::optional<double> planted_shift_norm;
};

/// Full deterministic instance for one trial; the same (n, mode, seed)
/// rebuilds it bit-exactly.
TrialInstance make_trial_instance(int n, InstanceMode mode, std::uint64_t seed);

/// Runs trials_per_size solves per size (the first round(f*T) trials planted)
/// with per-trial seeds derive_seed(base_seed, n, trial). All record fields
/// except wall_seconds depend only on the config.
std::vector<TrialRecord> run_sweep(const SweepConfig& cfg, const SolverConfig& solver_cfg = {});

struct SizeSummary {
    int n = 0;
    int count_stage_a = 0;
    int count_stage_b = 0;
    double residual_min = 0.0, residual_q25 = 0.0, residual_median = 0.0;
    double residual_q75 = 0.0, residual_max = 0.0;
    double mean_wall_seconds = 0.0;
    double max_wall_seconds = 0.0;
};

/// Residual clusters split at 1e-6; records inside (1e-6, 1e-2) sit in the
/// gap the mixed sweep is expected to keep empty and are reported, never
/// dropped.
struct ClusterReport {
    int small_count = 0;
    double small_min = 0.0, small_max = 0.0;
    int large_count = 0;
    double large_min = 0.0, large_max = 0.0;
    std::vector<TrialRecord> gap_records;
};

struct SweepSummary {
    std::vector<SizeSummary> per_size;
    ClusterReport clusters;
};

SweepSummary summarize(const std::vector<TrialRecord>& records);  // throws EmptyInputError

/// CSV with header n,trial,mode,stage,eig_residual,frob_norm,wall_seconds,seed;
/// floating-point fields carry 17 significant digits.
void write_csv(std::ostream& os, const std::vector<TrialRecord>& records);

void print_summary(std::ostream& os, const SweepSummary& summary);

}  // namespace nnh
