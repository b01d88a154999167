#include "nnhankel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "nnhankel/rng.hpp"

namespace nnh {

namespace {

// Sub-stream tags within one trial seed.
enum : std::uint64_t { kTagMatrix = 0, kTagEigIndex = 1, kTagShift = 2, kTagLambda = 3 };

Eigen::VectorXd gaussian_vector(int len, std::uint64_t seed) {
    GaussianStream g(seed);
    Eigen::VectorXd v(len);
    for (int i = 0; i < len; ++i) v[i] = g();
    return v;
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::string to_string(InstanceMode mode) {
    return mode == InstanceMode::Planted ? "planted" : "arbitrary";
}

std::string to_string(Stage stage) { return stage == Stage::ExactA ? "A" : "B"; }

HankelGenerator gen_random_hankel(int n, std::uint64_t seed) {
    if (n < 1) throw DimensionMismatchError("gen_random_hankel requires n >= 1");
    return HankelGenerator(gaussian_vector(2 * n - 1, seed));
}

Eigenpair gen_candidate_eigenpair(const HankelGenerator& g, InstanceMode mode,
                                  std::uint64_t seed) {
    const int n = g.dim();
    if (mode == InstanceMode::Planted) {
        const Eigen::VectorXd target =
            gaussian_vector(2 * n - 1, derive_seed(seed, kTagMatrix, 0)).cwiseAbs();
        const Eigen::MatrixXd dense = hankel_from_generator(HankelGenerator(target));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
        if (eig.info() != Eigen::Success) {
            throw EigDecompositionError("eigendecomposition failed for planted instance");
        }
        SplitMix64 pick(derive_seed(seed, kTagEigIndex, 0));
        const int idx = static_cast<int>(pick.next() % static_cast<std::uint64_t>(n));
        Eigenpair p;
        p.lambda = eig.eigenvalues()[idx];
        p.x = eig.eigenvectors().col(idx).cast<std::complex<double>>();
        return p;
    }
    // Entrywise-nonnegative unit eigenvector with a negative eigenvalue
    // bounded away from zero: guaranteed unrealizable by any entrywise-
    // nonnegative matrix, with residual exactly |lambda|.
    Eigen::VectorXd x = gaussian_vector(n, derive_seed(seed, kTagMatrix, 0)).cwiseAbs();
    x /= x.norm();
    GaussianStream lam_stream(derive_seed(seed, kTagLambda, 0));
    Eigenpair p;
    p.lambda = -(0.1 + std::abs(lam_stream()));
    p.x = x.cast<std::complex<double>>();
    return p;
}

TrialInstance make_trial_instance(int n, InstanceMode mode, std::uint64_t seed) {
    if (mode == InstanceMode::Planted) {
        // Rebuild the planted matrix the eigenpair came from, then displace
        // it by a random Hankel shift; the planted matrix stays feasible.
        const Eigen::VectorXd target =
            gaussian_vector(2 * n - 1, derive_seed(seed, kTagMatrix, 0)).cwiseAbs();
        const Eigen::VectorXd shift = gaussian_vector(2 * n - 1, derive_seed(seed, kTagShift, 0));
        HankelGenerator h(target + shift);
        Eigenpair pair = gen_candidate_eigenpair(h, mode, seed);
        const double bound = weighted_frobenius_norm(shift, antidiag_weights(n));
        return TrialInstance{std::move(h), std::move(pair), bound};
    }
    HankelGenerator h = gen_random_hankel(n, derive_seed(seed, kTagShift, 0));
    Eigenpair pair = gen_candidate_eigenpair(h, mode, seed);
    return TrialInstance{std::move(h), std::move(pair), std::nullopt};
}

std::vector<TrialRecord> run_sweep(const SweepConfig& cfg, const SolverConfig& solver_cfg) {
    if (cfg.sizes.empty() || cfg.trials_per_size < 1) {
        throw EmptyInputError("run_sweep: empty size list or no trials");
    }
    for (std::size_t i = 1; i < cfg.sizes.size(); ++i) {
        if (cfg.sizes[i] <= cfg.sizes[i - 1]) {
            throw DimensionMismatchError("run_sweep: sizes must be strictly increasing");
        }
    }

    const int planted_count =
        static_cast<int>(std::lround(cfg.planted_fraction * cfg.trials_per_size));

    struct Job {
        int n;
        int trial;
        InstanceMode mode;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : cfg.sizes) {
        for (int trial = 0; trial < cfg.trials_per_size; ++trial) {
            const InstanceMode mode =
                trial < planted_count ? InstanceMode::Planted : InstanceMode::Arbitrary;
            jobs.push_back({n, trial, mode,
                            derive_seed(cfg.base_seed, static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(trial))});
        }
    }

    std::vector<TrialRecord> records(jobs.size());
    const auto run_job = [&](std::size_t i) {
        const Job& job = jobs[i];
        const TrialInstance inst = make_trial_instance(job.n, job.mode, job.seed);
        const SolveResult result = nearest_nonneg_hankel(inst.h, inst.pair, solver_cfg);
        records[i] = TrialRecord{job.n,
                                 job.trial,
                                 job.mode,
                                 result.stage,
                                 result.eig_residual,
                                 result.frob_norm,
                                 result.wall_seconds,
                                 job.seed};
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    run_job(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return records;
}

SweepSummary summarize(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw EmptyInputError("summarize: no records");

    SweepSummary out;
    std::vector<int> sizes;
    for (const TrialRecord& r : records) {
        if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) sizes.push_back(r.n);
    }
    std::sort(sizes.begin(), sizes.end());

    for (int n : sizes) {
        SizeSummary s;
        s.n = n;
        std::vector<double> residuals;
        double wall_sum = 0.0;
        for (const TrialRecord& r : records) {
            if (r.n != n) continue;
            (r.stage == Stage::ExactA ? s.count_stage_a : s.count_stage_b) += 1;
            residuals.push_back(r.eig_residual);
            wall_sum += r.wall_seconds;
            s.max_wall_seconds = std::max(s.max_wall_seconds, r.wall_seconds);
        }
        std::sort(residuals.begin(), residuals.end());
        s.residual_min = quantile(residuals, 0.0);
        s.residual_q25 = quantile(residuals, 0.25);
        s.residual_median = quantile(residuals, 0.5);
        s.residual_q75 = quantile(residuals, 0.75);
        s.residual_max = quantile(residuals, 1.0);
        s.mean_wall_seconds = wall_sum / static_cast<double>(residuals.size());
        out.per_size.push_back(s);
    }

    ClusterReport& c = out.clusters;
    for (const TrialRecord& r : records) {
        if (r.eig_residual <= 1e-6) {
            if (c.small_count == 0) {
                c.small_min = c.small_max = r.eig_residual;
            } else {
                c.small_min = std::min(c.small_min, r.eig_residual);
                c.small_max = std::max(c.small_max, r.eig_residual);
            }
            c.small_count += 1;
        } else {
            if (c.large_count == 0) {
                c.large_min = c.large_max = r.eig_residual;
            } else {
                c.large_min = std::min(c.large_min, r.eig_residual);
                c.large_max = std::max(c.large_max, r.eig_residual);
            }
            c.large_count += 1;
            if (r.eig_residual < 1e-2) c.gap_records.push_back(r);
        }
    }
    return out;
}

void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
    os << "n,trial,mode,stage,eig_residual,frob_norm,wall_seconds,seed\n";
    for (const TrialRecord& r : records) {
        os << r.n << ',' << r.trial << ',' << to_string(r.mode) << ',' << to_string(r.stage) << ','
           << format17(r.eig_residual) << ',' << format17(r.frob_norm) << ','
           << format17(r.wall_seconds) << ',' << r.seed << '\n';
    }
}

void print_summary(std::ostream& os, const SweepSummary& summary) {
    os << "   n  stageA  stageB  residual[min/median/max]            wall[mean/max] s\n";
    for (const SizeSummary& s : summary.per_size) {
        char line[160];
        std::snprintf(line, sizeof(line), "%4d  %6d  %6d  %9.3e %9.3e %9.3e   %9.3e %9.3e\n", s.n,
                      s.count_stage_a, s.count_stage_b, s.residual_min, s.residual_median,
                      s.residual_max, s.mean_wall_seconds, s.max_wall_seconds);
        os << line;
    }
    const ClusterReport& c = summary.clusters;
    os << "clusters (split at 1e-6):\n";
    if (c.small_count > 0) {
        os << "  residual <= 1e-6: " << c.small_count << " records in [" << format17(c.small_min)
           << ", " << format17(c.small_max) << "]\n";
    }
    if (c.large_count > 0) {
        os << "  residual  > 1e-6: " << c.large_count << " records in [" << format17(c.large_min)
           << ", " << format17(c.large_max) << "]\n";
    }
    if (!c.gap_records.empty()) {
        os << "  WARNING: " << c.gap_records.size() << " record(s) in the gap (1e-6, 1e-2):\n";
        for (const TrialRecord& r : c.gap_records) {
            os << "    n=" << r.n << " trial=" << r.trial << " mode=" << to_string(r.mode)
               << " residual=" << format17(r.eig_residual) << " seed=" << r.seed << '\n';
        }
    } else {
        os << "  gap (1e-6, 1e-2): empty\n";
    }
}

}  // namespace nnh
