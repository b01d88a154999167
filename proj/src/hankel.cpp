#include "nnhankel/hankel.hpp"

#include <algorithm>
#include <cmath>

namespace nnh {

HankelGenerator::HankelGenerator(Eigen::VectorXd antidiagonals) : c_(std::move(antidiagonals)) {
    const auto len = c_.size();
    if (len < 1 || len % 2 == 0) {
        throw DimensionMismatchError("Hankel generator length must be 2n-1, got " +
                                     std::to_string(len));
    }
    n_ = static_cast<int>((len + 1) / 2);
}

Eigen::MatrixXd hankel_from_generator(const HankelGenerator& g) {
    const int n = g.dim();
    const Eigen::VectorXd& c = g.coeffs();
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            m(i, j) = c[i + j];
        }
    }
    return m;
}

HankelGenerator generator_of(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionMismatchError("generator_of requires a nonempty square matrix");
    }
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd c(2 * n - 1);
    for (int k = 0; k < 2 * n - 1; ++k) {
        const int i_lo = std::max(0, k - n + 1);
        const int i_hi = std::min(n - 1, k);
        double lo = m(i_lo, k - i_lo);
        double hi = lo;
        double sum = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
            const double v = m(i, k - i);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        if (hi - lo > tol) {
            throw NotHankelError(k + 1, hi - lo);
        }
        // The mean of identical values is that value; skipping the division
        // keeps the generator round-trip bit-exact.
        c[k] = (hi == lo) ? lo : sum / (i_hi - i_lo + 1);
    }
    return HankelGenerator(std::move(c));
}

Eigen::MatrixXd build_structure_matrix(int n) {
    if (n < 1) throw DimensionMismatchError("build_structure_matrix requires n >= 1");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, 2 * n - 1);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            s(static_cast<Eigen::Index>(j) * n + i, i + j) = 1.0;
        }
    }
    return s;
}

Eigen::VectorXd antidiag_weights(int n) {
    if (n < 1) throw DimensionMismatchError("antidiag_weights requires n >= 1");
    Eigen::VectorXd w(2 * n - 1);
    for (int k = 0; k < 2 * n - 1; ++k) {
        w[k] = static_cast<double>(std::min(k + 1, 2 * n - 1 - k));
    }
    return w;
}

double weighted_frobenius_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
    if (z.size() != w.size()) {
        throw DimensionMismatchError("weighted_frobenius_norm: length mismatch");
    }
    return std::sqrt(w.dot(z.cwiseProduct(z)));
}

Eigen::MatrixXcd eigmap_matrix(const Eigen::VectorXcd& x) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw DimensionMismatchError("eigmap_matrix requires a nonempty vector");
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, 2 * n - 1);
    for (int i = 0; i < n; ++i) {
        for (int k = i; k < i + n; ++k) {
            c(i, k) = x[k - i];
        }
    }
    return c;
}

Eigen::VectorXcd eigmap_apply(const Eigen::VectorXcd& x, const Eigen::VectorXd& z) {
    const int n = static_cast<int>(x.size());
    if (z.size() != 2 * n - 1) {
        throw DimensionMismatchError("eigmap_apply: generator length must be 2n-1");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            acc += z[i + j] * x[j];
        }
        out[i] = acc;
    }
    return out;
}

Eigen::VectorXcd eigpair_residual(const HankelGenerator& g, const Eigenpair& p) {
    if (p.x.size() != g.dim()) {
        throw DimensionMismatchError("eigpair_residual: eigenvector length != matrix dimension");
    }
    return p.lambda * p.x - eigmap_apply(p.x, g.coeffs());
}

}  // namespace nnh
