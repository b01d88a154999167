#pragma once

#include <Eigen/Dense>
#include <variant>

#include "nnhankel/errors.hpp"

namespace nnh {

enum class Stage { ExactA, ResidualB };

/*!
 * Real-valued encoding of the eigenpair constraint C z = r over the Hankel
 * parameters z.  For complex data the real and imaginary parts are stacked,
 * so ||A z - b||_2 over the reals equals ||C z - r||_2 over the complexes
 * for every real z.  `lower` carries the entrywise nonnegativity bound
 * z >= lower (= minus the input generator).
 */
struct RealifiedSystem {
    Eigen::MatrixXd A;      // m x p, m = n (real data) or 2n, p = 2n-1
    Eigen::VectorXd b;      // length m
    Eigen::VectorXd lower;  // length p
};

struct SolverConfig {
    double tol_feas = 1e-8;          // feasibility threshold, scaled by max(1, ||b||)
    double tol_kkt = 1e-8;           // KKT/multiplier tolerances
    int max_iter = 0;                // 0 means 50*p
    double tiebreak_epsilon = 1e-10; // residual slack guard for the Stage-B tie-break
    bool stage_b_tiebreak = true;    // select the minimal-norm Stage-B minimizer
};

/// First-order optimality diagnostics for a candidate z. All fields >= 0;
/// a solution is certified when each is below its tolerance. Equality and
/// bound measures are absolute; stationarity is relative to the gradient
/// scale and the complementarity products to the dual and slack scales.
struct KktReport {
    double equality_residual = 0.0;        // ||A z - b||_2
    double bound_violation = 0.0;          // max((lower - z)_+)
    double stationarity_residual = 0.0;    // grad - A^T mu - nu, plus dual sign violations
    double complementarity_residual = 0.0; // max nu_k (z_k - lower_k), scaled
    int iterations = 0;
};

struct NnlsSolution {
    Eigen::VectorXd y;
    KktReport report;
};

/// Nonnegative least squares: min ||A y - b||_2 over y >= 0.
/// Lawson-Hanson active-set iteration with restarted least-squares
/// subproblems; throws MaxIterationsError on non-convergence.
NnlsSolution nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolverConfig& cfg);

struct FeasibilityResult {
    bool feasible = false;
    double min_residual = 0.0;  // min over z >= lower of ||A z - b||
    Eigen::VectorXd witness;    // attains min_residual
    KktReport report;
};

/// Minimizes ||A z - b|| over z >= lower through the shifted NNLS y = z - lower;
/// feasible iff the minimum is <= tol_feas * max(1, ||b||).
FeasibilityResult check_feasibility(const RealifiedSystem& sys, const SolverConfig& cfg);

struct StageASolution {
    Eigen::VectorXd z;
    KktReport report;
};

struct StageAInfeasible {
    double min_residual = 0.0;
    Eigen::VectorXd witness;  // the Stage-B minimizer (pre-tie-break)
    KktReport report;
};

using StageAResult = std::variant<StageASolution, StageAInfeasible>;

/// Stage A: min sum_k w_k z_k^2 s.t. A z = b, z >= lower. Runs the
/// feasibility check first and returns StageAInfeasible (with the Stage-B
/// residual as certificate) when the equality system cannot be met.
StageAResult solve_stage_a(const RealifiedSystem& sys, const Eigen::VectorXd& w,
                           const SolverConfig& cfg);

/// The equality-and-bound QP behind Stage A:
/// min sum_k w_k z_k^2 s.t. A z = b, z >= lower (b is replaced by its
/// projection onto range(A) when inconsistent). Solved exactly by
/// eliminating the equalities over the weighted nullspace and running the
/// least-distance-programming reduction through the NNLS engine, then
/// polishing the detected active set. `fallback` (a feasible point, e.g.
/// the feasibility witness) rescues borderline instances whose minimum-norm
/// point is numerically out of reach; without one they throw
/// MaxIterationsError.
StageASolution solve_min_norm_qp(const RealifiedSystem& sys, const Eigen::VectorXd& w,
                                 const SolverConfig& cfg,
                                 const Eigen::VectorXd* fallback = nullptr);

/// Recomputes all four KKT residuals for a candidate z of either stage.
/// Pure diagnostic; multipliers are reconstructed by least squares.
KktReport kkt_verify(const RealifiedSystem& sys, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& z, Stage stage);

}  // namespace nnh
