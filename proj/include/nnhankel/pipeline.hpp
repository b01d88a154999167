#pragma once

#include <Eigen/Dense>

#include "nnhankel/hankel.hpp"
#include "nnhankel/solver.hpp"

namespace nnh {

struct SolveResult {
    Stage stage = Stage::ExactA;
    Eigen::VectorXd delta_generator;      // anti-diagonals of the perturbation
    Eigen::VectorXd corrected_generator;  // input generator + delta
    double frob_norm = 0.0;               // Frobenius norm of the perturbation
    double eig_residual = 0.0;            // ||corrected*x - lambda*x||_2
    KktReport kkt;
    double wall_seconds = 0.0;
};

/// Builds the real system A z = b, z >= lower from the eigenpair constraint.
/// The imaginary block is stacked only when the data is genuinely complex
/// (max |Im| of the constraint matrix and residual above 1e-15).
RealifiedSystem realify(const Eigen::VectorXcd& x, const Eigen::VectorXcd& r,
                        const HankelGenerator& g);

/*!
 * The two-stage solve: find the entrywise-nonnegative Hankel matrix nearest
 * to the input that realizes the prescribed eigenpair exactly when the
 * constraint system is feasible (minimum Frobenius-norm correction), and
 * the residual-minimizing one otherwise.  The feasibility probe's witness
 * warm-starts the exact stage, and is the inexact stage's answer (followed
 * by a minimal-norm tie-break over the optimal face unless disabled in cfg).
 */
SolveResult nearest_nonneg_hankel(const HankelGenerator& g, const Eigenpair& p,
                                  const SolverConfig& cfg = {});

struct VerificationReport {
    double min_entry = 0.0;  // smallest entry of the corrected matrix
    bool hankel_exact = false;
    bool nonneg_ok = false;  // min_entry >= -1e-10 * max(1, largest corrected entry)
    double recomputed_eig_residual = 0.0;
    double recomputed_frob_norm = 0.0;
    bool frob_norm_mismatch = false;
    bool eig_residual_mismatch = false;
    bool generator_sum_mismatch = false;  // corrected != input + delta

    bool passed() const {
        return hankel_exact && nonneg_ok && !frob_norm_mismatch && !eig_residual_mismatch &&
               !generator_sum_mismatch;
    }
};

/// Recomputes every reported quantity of `result` from a dense
/// reconstruction and flags relative mismatches above 1e-10. Report-only.
VerificationReport verify_solution(const HankelGenerator& g, const SolveResult& result,
                                   const Eigenpair& p);

}  // namespace nnh
