#pragma once

#include <Eigen/Dense>
#include <optional>

#include "nnhankel/solver.hpp"

namespace nnh {

/// Ground truth from exhaustive enumeration (see enumerate_active_set_oracle).
struct OracleResult {
    std::optional<double> stage_a_objective;  // min sum w_k z_k^2, empty if infeasible
    Eigen::VectorXd stage_a_minimizer;
    double stage_b_objective = 0.0;  // min ||A z - b||^2
    Eigen::VectorXd stage_b_minimizer;
};

/// Brute-force reference for both stages, independent of the iterative
/// solvers: every subset of bounds is forced active and the remaining
/// equality-constrained subproblem is solved in closed form, keeping the
/// best candidate that satisfies the untouched constraints. Restricted to
/// p = 2n-1 <= 9 (512 subsets); throws OracleTooLargeError beyond that.
OracleResult enumerate_active_set_oracle(const RealifiedSystem& sys, const Eigen::VectorXd& w);

}  // namespace nnh
