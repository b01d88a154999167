#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nnhankel/hankel.hpp"
#include "nnhankel/oracle.hpp"
#include "nnhankel/rng.hpp"
#include "nnhankel/solver.hpp"

using namespace nnh;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> values) {
    VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

VectorXd random_gaussian(int len, std::uint64_t seed) {
    GaussianStream g(seed);
    VectorXd v(len);
    for (int i = 0; i < len; ++i) v[i] = g();
    return v;
}

RealifiedSystem make_system(const VectorXd& gen, double lambda, const VectorXd& x) {
    const VectorXcd xc = x.cast<std::complex<double>>();
    RealifiedSystem sys;
    sys.A = eigmap_matrix(xc).real();
    sys.b = (lambda * xc - eigmap_apply(xc, gen)).real();
    sys.lower = -gen;
    return sys;
}

const VectorXd kExample1Gen =
    vec({0.0903, -1.4229, 0.0694, -0.0928, 1.4677, 1.3898, -0.3613, -0.5182, 0.1594});
const VectorXd kExample1X = vec({-0.2392, -0.5470, -0.7013, -0.3812, 0.0806});
const VectorXd kExample2Gen =
    vec({-1.1923, 1.2917, 0.3320, -0.6178, 0.4433, -0.8108, -0.0862, 1.7344, 0.6217});
const VectorXd kExample2X = vec({0.7298, 0.2273, 0.6387, -0.0018, 0.0881});

// Stage-B optimum of the second regression system, frozen from the
// enumeration oracle (two further independent routes agree).
constexpr double kExample2MinResidual = 2.3738343269348732e-4;
constexpr double kExample1StageANorm = 11.614909330613946;

// Feasible planted system: eigenpair of a nonnegative matrix, input shifted.
struct Planted {
    RealifiedSystem sys;
    VectorXd w;
    VectorXd feasible_point;  // minus the shift
};

Planted make_planted(int n, std::uint64_t seed) {
    const VectorXd target = random_gaussian(2 * n - 1, seed).cwiseAbs();
    const VectorXd shift = random_gaussian(2 * n - 1, seed + 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(hankel_from_generator(HankelGenerator(target)));
    REQUIRE(eig.info() == Eigen::Success);
    SplitMix64 pick(seed + 2);
    const int idx = static_cast<int>(pick.next() % static_cast<std::uint64_t>(n));
    return Planted{make_system(target + shift, eig.eigenvalues()[idx], eig.eigenvectors().col(idx)),
                   antidiag_weights(n), -shift};
}

}  // namespace

TEST_CASE("nnls: separable projection onto the orthant") {
    const NnlsSolution s = nnls(MatrixXd::Identity(2, 2), vec({1.0, -1.0}), SolverConfig{});
    CHECK(s.y[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.y[1] == 0.0);
    CHECK(s.report.equality_residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nnls: all-ones eigenvector with negative target pins y at zero") {
    const VectorXcd ones = VectorXcd::Ones(3);
    const MatrixXd a = eigmap_matrix(ones).real();
    const NnlsSolution s = nnls(a, vec({-1.0, -1.0, -1.0}), SolverConfig{});
    CHECK(s.y.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.report.equality_residual == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("nnls: shifted regression system attains the enumerated optimum") {
    const RealifiedSystem sys = make_system(kExample2Gen, 0.152982, kExample2X);
    const NnlsSolution s = nnls(sys.A, sys.b - sys.A * sys.lower, SolverConfig{});
    CHECK(s.report.equality_residual == doctest::Approx(kExample2MinResidual).epsilon(1e-9));
    const OracleResult oracle = enumerate_active_set_oracle(sys, antidiag_weights(5));
    CHECK(std::sqrt(oracle.stage_b_objective) ==
          doctest::Approx(kExample2MinResidual).epsilon(1e-9));
}

TEST_CASE("nnls: dimension mismatch and iteration cap") {
    CHECK_THROWS_AS((void)nnls(MatrixXd::Identity(3, 3), vec({1.0, 2.0}), SolverConfig{}),
                    DimensionMismatchError);
    SolverConfig tight;
    tight.max_iter = 1;
    const RealifiedSystem sys = make_system(kExample2Gen, 0.152982, kExample2X);
    CHECK_THROWS_AS((void)nnls(sys.A, sys.b - sys.A * sys.lower, tight), MaxIterationsError);
}

TEST_CASE("nnls first-order optimality under random feasible perturbations") {
    SplitMix64 pick(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int p = 2 + static_cast<int>(pick.next() % 19);
        const int m = 2 + static_cast<int>(pick.next() % 19);
        const VectorXd entries = random_gaussian(m * p, 5000 + static_cast<std::uint64_t>(trial));
        const MatrixXd a = Eigen::Map<const MatrixXd>(entries.data(), m, p);
        const VectorXd b = random_gaussian(m, 9000 + static_cast<std::uint64_t>(trial));
        const NnlsSolution s = nnls(a, b, SolverConfig{});
        const double base = (a * s.y - b).norm();
        bool ok = true;
        for (int d = 0; d < 100 && ok; ++d) {
            VectorXd dir = random_gaussian(
                p, derive_seed(13, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(d)));
            for (int k = 0; k < p; ++k) {
                if (s.y[k] <= 0.0 && dir[k] < 0.0) dir[k] = -dir[k];  // keep y + eps*dir >= 0
            }
            ok = (a * (s.y + 1e-4 * dir) - b).norm() >= base - 1e-10;
        }
        CHECK(ok);
    }
}

TEST_CASE("check_feasibility on the regression systems") {
    SolverConfig cfg;
    {
        const RealifiedSystem sys = make_system(kExample1Gen, 1.301415, kExample1X);
        const FeasibilityResult f = check_feasibility(sys, cfg);
        CHECK(f.feasible);
        CHECK(f.min_residual <= 1e-10);
        CHECK((sys.A * f.witness - sys.b).norm() <= 1e-10);
    }
    {
        const RealifiedSystem sys = make_system(kExample2Gen, 0.152982, kExample2X);
        const FeasibilityResult f = check_feasibility(sys, cfg);
        CHECK(!f.feasible);
        CHECK(f.min_residual == doctest::Approx(kExample2MinResidual).epsilon(1e-9));
        CHECK((sys.A * f.witness - sys.b).norm() == doctest::Approx(f.min_residual).epsilon(1e-12));
    }
}

TEST_CASE("check_feasibility: nonnegative input with its own eigenpair") {
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        const int n = 4;
        const VectorXd target = random_gaussian(2 * n - 1, seed).cwiseAbs();
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(
            hankel_from_generator(HankelGenerator(target)));
        const RealifiedSystem sys =
            make_system(target, eig.eigenvalues()[1], eig.eigenvectors().col(1));
        const FeasibilityResult f = check_feasibility(sys, SolverConfig{});
        CHECK(f.feasible);
        CHECK(f.min_residual <= 1e-10);
        // the zero perturbation is then optimal for the exact stage
        const StageAResult a = solve_stage_a(sys, antidiag_weights(n), SolverConfig{});
        REQUIRE(std::holds_alternative<StageASolution>(a));
        CHECK(std::get<StageASolution>(a).z.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("solve_stage_a on the regression systems") {
    const VectorXd w = antidiag_weights(5);
    {
        const RealifiedSystem sys = make_system(kExample1Gen, 1.301415, kExample1X);
        const StageAResult r = solve_stage_a(sys, w, SolverConfig{});
        REQUIRE(std::holds_alternative<StageASolution>(r));
        const auto& sol = std::get<StageASolution>(r);
        CHECK(weighted_frobenius_norm(sol.z, w) == doctest::Approx(11.61675).epsilon(1e-2));
        CHECK(weighted_frobenius_norm(sol.z, w) ==
              doctest::Approx(kExample1StageANorm).epsilon(1e-10));
        CHECK(sol.report.equality_residual <= 1e-10);
        CHECK(((sol.z - sys.lower).array() >= -1e-12).all());
    }
    {
        const VectorXcd ones = VectorXcd::Ones(3);
        RealifiedSystem sys;
        sys.A = eigmap_matrix(ones).real();
        sys.b = vec({-1.0, -1.0, -1.0});
        sys.lower = VectorXd::Zero(5);
        const StageAResult r = solve_stage_a(sys, antidiag_weights(3), SolverConfig{});
        REQUIRE(std::holds_alternative<StageAInfeasible>(r));
        const auto& inf = std::get<StageAInfeasible>(r);
        CHECK(inf.min_residual == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(inf.witness.cwiseAbs().maxCoeff() == 0.0);
    }
    {
        // b = 0 with lower <= 0: the zero vector is feasible and optimal
        RealifiedSystem sys = make_system(kExample1Gen.cwiseAbs(), 0.0, kExample1X);
        sys.b.setZero();
        const StageAResult r = solve_stage_a(sys, w, SolverConfig{});
        REQUIRE(std::holds_alternative<StageASolution>(r));
        CHECK(std::get<StageASolution>(r).z.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("enumeration oracle: regression objectives and size guard") {
    const VectorXd w = antidiag_weights(5);
    {
        const RealifiedSystem sys = make_system(kExample1Gen, 1.301415, kExample1X);
        const OracleResult o = enumerate_active_set_oracle(sys, w);
        REQUIRE(o.stage_a_objective.has_value());
        CHECK(std::abs(*o.stage_a_objective - 11.61675 * 11.61675) <= 1e-1);
        CHECK(std::sqrt(*o.stage_a_objective) ==
              doctest::Approx(kExample1StageANorm).epsilon(1e-12));
        CHECK(o.stage_b_objective <= 1e-20);
    }
    {
        const VectorXcd ones = VectorXcd::Ones(3);
        RealifiedSystem sys;
        sys.A = eigmap_matrix(ones).real();
        sys.b = vec({-1.0, -1.0, -1.0});
        sys.lower = VectorXd::Zero(5);
        const OracleResult o = enumerate_active_set_oracle(sys, antidiag_weights(3));
        CHECK(!o.stage_a_objective.has_value());
        CHECK(o.stage_b_objective == doctest::Approx(3.0).epsilon(1e-12));
    }
    RealifiedSystem big;
    big.A = MatrixXd::Identity(11, 11);
    big.b = VectorXd::Zero(11);
    big.lower = VectorXd::Zero(11);
    CHECK_THROWS_AS((void)enumerate_active_set_oracle(big, VectorXd::Ones(11)),
                    OracleTooLargeError);
}

TEST_CASE("iterative solvers match the enumeration oracle on random instances") {
    const SolverConfig cfg;
    for (int n : {2, 3}) {
        const VectorXd w = antidiag_weights(n);
        for (int trial = 0; trial < 100; ++trial) {
            const std::uint64_t seed =
                derive_seed(321, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
            const VectorXd gen = random_gaussian(2 * n - 1, seed);
            VectorXd x = random_gaussian(n, seed + 1);
            x /= x.norm();
            GaussianStream lam(seed + 2);
            const RealifiedSystem sys = make_system(gen, lam(), x);
            const OracleResult o = enumerate_active_set_oracle(sys, w);
            const StageAResult r = solve_stage_a(sys, w, cfg);
            if (const auto* sol = std::get_if<StageASolution>(&r)) {
                REQUIRE(o.stage_a_objective.has_value());
                const double obj = w.dot(sol->z.cwiseProduct(sol->z));
                CHECK(std::abs(obj - *o.stage_a_objective) <=
                      1e-8 * std::max(1.0, *o.stage_a_objective));
            } else {
                const auto& inf = std::get<StageAInfeasible>(r);
                CHECK(std::abs(inf.min_residual * inf.min_residual - o.stage_b_objective) <=
                      1e-8 * std::max(1.0, o.stage_b_objective));
            }
        }
    }
}

TEST_CASE("exact-stage minimizer is unique across parameter orderings") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const int n = 3 + static_cast<int>(seed % 8);
        const Planted p = make_planted(n, seed * 7);
        const FeasibilityResult f = check_feasibility(p.sys, SolverConfig{});
        REQUIRE(f.feasible);
        const StageASolution forward = solve_min_norm_qp(p.sys, p.w, SolverConfig{});
        // reversing the parameter ordering takes a different numerical path
        // to the same (unique) minimizer
        RealifiedSystem reversed;
        reversed.A = p.sys.A.rowwise().reverse();
        reversed.b = p.sys.b;
        reversed.lower = p.sys.lower.reverse();
        const StageASolution backward =
            solve_min_norm_qp(reversed, p.w.reverse(), SolverConfig{});
        CHECK((forward.z - backward.z.reverse()).cwiseAbs().maxCoeff() <= 1e-6);
        // the planted point is feasible, so the optimum cannot cost more
        CHECK(p.w.dot(forward.z.cwiseProduct(forward.z)) <=
              p.w.dot(p.feasible_point.cwiseProduct(p.feasible_point)) + 1e-6);
    }
}

TEST_CASE("inexact-stage optimal value is invariant under column reordering") {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        const int n = 3 + static_cast<int>(seed % 6);
        const VectorXd gen = random_gaussian(2 * n - 1, seed);
        VectorXd x = random_gaussian(n, seed + 1);
        x /= x.norm();
        GaussianStream lam(seed + 2);
        const RealifiedSystem sys = make_system(gen, lam(), x);
        const VectorXd shifted = sys.b - sys.A * sys.lower;
        const NnlsSolution forward = nnls(sys.A, shifted, SolverConfig{});
        const MatrixXd reversed_a = sys.A.rowwise().reverse();
        const NnlsSolution reversed = nnls(reversed_a, shifted, SolverConfig{});
        CHECK(std::abs(forward.report.equality_residual - reversed.report.equality_residual) <=
              1e-8);
    }
}

TEST_CASE("positive eigenvector with negative eigenvalue is always infeasible") {
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t seed = derive_seed(777, 0, static_cast<std::uint64_t>(trial));
        const int n = 2 + static_cast<int>(SplitMix64(seed).next() % 9);
        const VectorXd gen = random_gaussian(2 * n - 1, seed + 1);
        VectorXd x = random_gaussian(n, seed + 2).cwiseAbs();
        x /= x.norm();
        GaussianStream lam(seed + 3);
        const double lambda = -std::abs(lam()) - 1e-3;
        const RealifiedSystem sys = make_system(gen, lambda, x);
        const FeasibilityResult f = check_feasibility(sys, SolverConfig{});
        CHECK(!f.feasible);
        CHECK(f.min_residual >= std::abs(lambda) * 0.999);  // componentwise lower bound
    }
}

TEST_CASE("equality constraints never improve the inexact objective") {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
        const Planted p = make_planted(4 + static_cast<int>(seed % 5), seed * 13);
        const StageAResult r = solve_stage_a(p.sys, p.w, SolverConfig{});
        REQUIRE(std::holds_alternative<StageASolution>(r));
        // the exact solution solves the inexact problem with zero residual
        CHECK(std::get<StageASolution>(r).report.equality_residual <=
              1e-8 * std::max(1.0, p.sys.b.norm()));
    }
}

TEST_CASE("kkt_verify") {
    const VectorXd w = antidiag_weights(5);
    {
        const RealifiedSystem sys = make_system(kExample1Gen, 1.301415, kExample1X);
        const StageAResult r = solve_stage_a(sys, w, SolverConfig{});
        const auto& sol = std::get<StageASolution>(r);
        const KktReport rep = kkt_verify(sys, w, sol.z, Stage::ExactA);
        CHECK(rep.equality_residual <= 1e-8);
        CHECK(rep.bound_violation <= 1e-8);
        CHECK(rep.stationarity_residual <= 1e-8);
        CHECK(rep.complementarity_residual <= 1e-8);
    }
    {
        const RealifiedSystem sys = make_system(kExample2Gen, 0.152982, kExample2X);
        const FeasibilityResult f = check_feasibility(sys, SolverConfig{});
        const KktReport rep = kkt_verify(sys, w, f.witness, Stage::ResidualB);
        CHECK(rep.stationarity_residual <= 1e-8);
        CHECK(rep.equality_residual == doctest::Approx(f.min_residual).epsilon(1e-12));
    }
    {
        const RealifiedSystem sys = make_system(kExample1Gen, 1.301415, kExample1X);
        VectorXd z = sys.lower;
        z[3] -= 0.5;
        const KktReport rep = kkt_verify(sys, w, z, Stage::ResidualB);
        CHECK(rep.bound_violation == doctest::Approx(0.5).epsilon(1e-12));
        CHECK_THROWS_AS((void)kkt_verify(sys, w, VectorXd::Zero(3), Stage::ExactA),
                        DimensionMismatchError);
    }
}
