#pragma once

#include <Eigen/Dense>
#include <complex>

#include "nnhankel/errors.hpp"

namespace nnh {

/*!
 * An n-by-n real Hankel matrix stored through its generating vector: the
 * (2n-1) anti-diagonal values c with
 *
 *   H(i,j) = c[i + j - 1],   1 <= i,j <= n  (1-based),
 *
 * so c[1] sits in the top-left corner and c[2n-1] in the bottom-right.
 * Anti-diagonal k holds min(k, 2n-k) matrix entries; every Hankel matrix
 * is symmetric.
 */
class HankelGenerator {
public:
    /// Takes ownership of the anti-diagonal values; length must be odd (2n-1).
    explicit HankelGenerator(Eigen::VectorXd antidiagonals);

    int dim() const noexcept { return n_; }
    const Eigen::VectorXd& coeffs() const noexcept { return c_; }

private:
    Eigen::VectorXd c_;
    int n_ = 0;
};

/// Dense reconstruction M(i,j) = c[i+j-1].
Eigen::MatrixXd hankel_from_generator(const HankelGenerator& g);

/// Inverse of hankel_from_generator. Each anti-diagonal may vary by at most
/// `tol` (max minus min); the recovered value is the anti-diagonal mean.
/// Throws NotHankelError on the first offending anti-diagonal.
HankelGenerator generator_of(const Eigen::MatrixXd& m, double tol);

/// The n^2 x (2n-1) 0/1 matrix S with vec(H) = S c, column-major vec,
/// row index (j-1)n + i. Test-scale only; production paths never form it.
Eigen::MatrixXd build_structure_matrix(int n);

/// Anti-diagonal multiplicities w[k] = min(k, 2n-k); equals diag(S^T S).
Eigen::VectorXd antidiag_weights(int n);

/// sqrt(sum_k w[k] z[k]^2) == Frobenius norm of the Hankel matrix built from z.
double weighted_frobenius_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& w);

/// The n x (2n-1) matrix C with C z = (Hankel matrix of z) * x for every
/// real generator z: C(i,k) = x[k-i+1] when that index is in range.
Eigen::MatrixXcd eigmap_matrix(const Eigen::VectorXcd& x);

/// Matrix-free action: (Hankel matrix of z) * x.
Eigen::VectorXcd eigmap_apply(const Eigen::VectorXcd& x, const Eigen::VectorXd& z);

struct Eigenpair {
    std::complex<double> lambda;
    Eigen::VectorXcd x;  // must be nonzero
};

/// r = lambda*x - H*x.
Eigen::VectorXcd eigpair_residual(const HankelGenerator& g, const Eigenpair& p);

}  // namespace nnh
