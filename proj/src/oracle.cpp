#include "nnhankel/oracle.hpp"

#include <cmath>
#include <vector>

namespace nnh {

namespace {

Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    if (a.cols() == 0) return Eigen::VectorXd(0);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-12);
    Eigen::VectorXd x = cod.solve(b);
    // One round of residual correction; ill-conditioned subsets otherwise
    // lose enough digits to shift the candidate objective noticeably.
    x += cod.solve(b - a * x);
    return x;
}

}  // namespace

OracleResult enumerate_active_set_oracle(const RealifiedSystem& sys, const Eigen::VectorXd& w) {
    const int p = static_cast<int>(sys.A.cols());
    const int m = static_cast<int>(sys.A.rows());
    if (p > 9) {
        throw OracleTooLargeError("enumeration oracle limited to 9 parameters, got " +
                                  std::to_string(p));
    }
    if (sys.lower.size() != p || w.size() != p || sys.b.size() != m) {
        throw DimensionMismatchError("enumerate_active_set_oracle: inconsistent dimensions");
    }

    const double b_scale = std::max(1.0, sys.b.norm());
    OracleResult best;
    bool have_b = false;

    for (unsigned mask = 0; mask < (1u << p); ++mask) {
        std::vector<int> forced, free_idx;
        for (int k = 0; k < p; ++k) {
            ((mask >> k) & 1u ? forced : free_idx).push_back(k);
        }
        const int nf = static_cast<int>(free_idx.size());

        Eigen::VectorXd rhs = sys.b;
        for (int k : forced) rhs -= sys.A.col(k) * sys.lower[k];

        Eigen::MatrixXd af(m, nf);
        for (int j = 0; j < nf; ++j) af.col(j) = sys.A.col(free_idx[j]);

        // ---- Stage A candidate: min sum w v^2 s.t. A_F v = rhs, in closed
        // form as the minimum-norm solve of (A_F W_F^{-1/2}) u = rhs. The
        // strictly convex objective makes the free block unique even for
        // rank-deficient subsets; inconsistent ones fail the equality filter.
        {
            Eigen::MatrixXd af_scaled = af;
            for (int j = 0; j < nf; ++j) af_scaled.col(j) /= std::sqrt(w[free_idx[j]]);
            const Eigen::VectorXd u = lstsq(af_scaled, rhs);
            Eigen::VectorXd z(p);
            for (int k : forced) z[k] = sys.lower[k];
            for (int j = 0; j < nf; ++j) z[free_idx[j]] = u[j] / std::sqrt(w[free_idx[j]]);
            // Filters scale with the candidate: honest solves land around
            // eps * scale, while a looser cutoff would admit off-manifold
            // candidates whose objective undercuts the true optimum.
            const double z_scale = std::max(1.0, z.cwiseAbs().maxCoeff());
            bool ok = true;
            for (int j = 0; j < nf; ++j) {
                if (z[free_idx[j]] < sys.lower[free_idx[j]] - 1e-10 * z_scale) {
                    ok = false;
                    break;
                }
            }
            if (ok && (sys.A * z - sys.b).norm() <= 1e-7 * b_scale + 1e-9 * z_scale) {
                const double obj = w.dot(z.cwiseProduct(z));
                if (!best.stage_a_objective || obj < *best.stage_a_objective) {
                    best.stage_a_objective = obj;
                    best.stage_a_minimizer = z;
                }
            }
        }

        // ---- Stage B candidate: plain least squares on the free columns.
        {
            Eigen::VectorXd t = lstsq(af, rhs);
            Eigen::VectorXd z(p);
            for (int k : forced) z[k] = sys.lower[k];
            for (int j = 0; j < nf; ++j) z[free_idx[j]] = t[j];
            const double z_scale = std::max(1.0, z.cwiseAbs().maxCoeff());
            bool ok = true;
            for (int j = 0; j < nf; ++j) {
                if (z[free_idx[j]] < sys.lower[free_idx[j]] - 1e-10 * z_scale) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                const double obj = (sys.A * z - sys.b).squaredNorm();
                if (!have_b || obj < best.stage_b_objective) {
                    have_b = true;
                    best.stage_b_objective = obj;
                    best.stage_b_minimizer = z;
                }
            }
        }
    }
    return best;
}

}  // namespace nnh
