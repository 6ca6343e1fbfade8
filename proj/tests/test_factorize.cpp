#include "doctest.h"

#include "fixtures.hpp"
#include "mawhf/factorize.hpp"

#include <cmath>

using namespace mawhf;

namespace {

FactorizeOptions no_grid() {
    FactorizeOptions opt;
    opt.build_grid = false;
    return opt;
}

}  // namespace

TEST_CASE("scalar supremum closed form") {
    auto spec = benchmarks::scalar(-1.0, 1.0, 2.0);
    auto f = solve_sup(spec, 1.0);
    const double r2 = std::sqrt(2.0);
    CHECK(f.p_plus(0, 0) == doctest::Approx(r2 / 2.0).epsilon(1e-10));
    CHECK(f.D_sup(0, 0) == doctest::Approx(r2).epsilon(1e-10));
    CHECK(f.M(0, 0) == doctest::Approx(r2 - 1.0).epsilon(1e-10));
    CHECK(f.diagnostics.converged);
    CHECK(!f.diagnostics.direct_solve);
    CHECK(f.diagnostics.uniqueness_gap < 1e-10);
    for (double x : {0.1, 1.0, 3.0}) {
        const double expect = (1.0 - r2 / 2.0) * std::exp(-r2 * x);
        CHECK(f.sup_tail(x)(0, 0) == doctest::Approx(expect).epsilon(1e-8));
        CHECK(first_passage_up(f, x)(0, 0) == doctest::Approx(expect).epsilon(1e-8));
    }
    CHECK(f.sup_tail(1.0)(0, 0) == doctest::Approx(0.07121).epsilon(1e-4));
}

TEST_CASE("scalar infimum closed form") {
    auto spec = benchmarks::scalar(-1.0, 3.0, 2.0);
    auto f = solve_inf(spec, 1.0, no_grid());
    const double r3 = std::sqrt(3.0);
    CHECK(f.p_check_plus(0, 0) == doctest::Approx(1.0 / (1.0 + r3)).epsilon(1e-10));
    CHECK(f.D_inf(0, 0) == doctest::Approx(r3 - 1.0).epsilon(1e-10));
    CHECK(f.m_check(0, 0) == doctest::Approx(1.0 / r3).epsilon(1e-10));
    CHECK(f.check_tail(0.0)(0, 0) == doctest::Approx(1.0 - 1.0 / (1.0 + r3)).epsilon(1e-10));
}

TEST_CASE("no upward jumps: the supremum vanishes") {
    auto spec = benchmarks::scalar(-1.0, 2.0, 2.0, 0.0, 1.5);
    auto f = solve_sup(spec, 0.7, no_grid());
    CHECK(max_abs(Matrix(f.p_plus - f.Ps)) < 1e-12);
    CHECK(max_abs(f.q_plus) < 1e-12);
    CHECK(max_abs(f.sup_tail(0.5)) < 1e-12);
}

TEST_CASE("pure drift: first passage down is exp(x)") {
    auto spec = benchmarks::scalar(-1.0, 0.0, 2.0);
    auto f = solve_inf(spec, 1.0);
    for (double x : {-0.2, -1.0, -4.0}) CHECK(first_passage_down(f, x)(0, 0) == doctest::Approx(std::exp(x)).epsilon(1e-8));
    CHECK_THROWS_AS(first_passage_down(f, 0.5), DomainError);
}

TEST_CASE("both factorization forms hold on random models") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        auto spec = testing::random_model(rng, 1 + trial % 3, {trial % 4 == 1, true});
        if (trial % 4 == 3) spec = mirror_model(spec);
        const double s = 0.25 + 0.5 * trial;
        auto sup = solve_sup(spec, s, no_grid());
        auto inf = solve_inf(spec, s, no_grid());
        auto r = identity_residuals(spec, sup, inf, alpha_probes(16));
        CHECK(r.sup_form < 1e-6);
        CHECK(r.inf_form < 1e-6);
        CHECK(r.boundary < 1e-6);
        CHECK(sup.diagnostics.uniqueness_gap < 1e-10);
        CHECK(inf.diagnostics.uniqueness_gap < 1e-10);
        CHECK(sup.diagnostics.iterations <= 200);
    }
}

TEST_CASE("identity and zero starts reach the same fixed point") {
    auto spec = benchmarks::two_state();
    FactorizeOptions a = no_grid(), b = no_grid();
    b.fixed_point.start = FixedPointStart::zero;
    auto fa = solve_sup(spec, 1.0, a);
    auto fb = solve_sup(spec, 1.0, b);
    CHECK(max_abs(Matrix(fa.M - fb.M)) < 1e-10);
    auto ia = solve_inf(spec, 1.0, a);
    auto ib = solve_inf(spec, 1.0, b);
    CHECK(max_abs(Matrix(ia.m_check - ib.m_check)) < 1e-10);
}

TEST_CASE("iteration budget: failure or direct fallback") {
    auto spec = benchmarks::two_state();
    FactorizeOptions opt = no_grid();
    opt.fixed_point.max_iterations = 2;
    opt.fixed_point.direct_fallback = false;
    CHECK_THROWS_AS(solve_sup(spec, 1.0, opt), NonConvergenceError);
    opt.fixed_point.direct_fallback = true;
    auto f = solve_sup(spec, 1.0, opt);
    CHECK(f.diagnostics.direct_solve);
    auto ref = solve_sup(spec, 1.0, no_grid());
    CHECK(max_abs(Matrix(f.M - ref.M)) < 1e-10);
}

TEST_CASE("mirror duality") {
    auto spec = benchmarks::two_state();
    auto inf = solve_inf(spec, 1.0);
    auto sup_m = solve_sup(mirror_model(spec), 1.0);
    CHECK(max_abs(Matrix(sup_m.p_plus - inf.p_minus)) < 1e-10);
    for (double x : {0.3, 1.0, 2.5}) CHECK(max_abs(Matrix(sup_m.sup_tail(x) - inf.inf_cdf(-x))) < 1e-8);
    for (double a : {-2.0, 0.7}) {
        CHECK(max_abs(CMatrix(sup_m.phi_plus(Complex{a, 0.0}) - inf.phi_minus(Complex{-a, 0.0}))) < 1e-10);
        CHECK(max_abs(CMatrix(sup_m.phi_minus(Complex{a, 0.0}) - inf.phi_plus(Complex{-a, 0.0}))) < 1e-10);
    }
    CHECK(max_abs(Matrix(sup_m.complement_cdf(-0.8) - inf.check_tail(0.8))) < 1e-8);
}

TEST_CASE("supremum tail is monotone with the predicted decay") {
    auto spec = benchmarks::two_state();
    auto f = solve_sup(spec, 0.5, no_grid());
    Matrix prev = f.sup_tail(0.0);
    for (int i = 1; i <= 40; ++i) {
        Matrix cur = f.sup_tail(0.25 * i);
        CHECK((prev - cur).minCoeff() > -1e-14);
        prev = cur;
    }
    Eigen::EigenSolver<Matrix> es(f.D_sup, false);
    double slow = es.eigenvalues().real().minCoeff();
    const double x1 = 20.0, x2 = 25.0;
    const double slope = std::log(f.sup_tail(x2).sum() / f.sup_tail(x1).sum()) / (x2 - x1);
    CHECK(slope == doctest::Approx(-slow).epsilon(1e-6));
}

TEST_CASE("tabulated complement reproduces its transform") {
    auto spec = benchmarks::two_state();
    auto f = solve_sup(spec, 1.0);
    REQUIRE(f.has_grid);
    for (double a : {-3.0, 0.0, 1.5}) {
        const Complex alpha{a, 0.0};
        CHECK(max_abs(CMatrix(retransform(f.grid, Complex{0.0, a}) - f.phi_minus(alpha))) < 1e-8);
    }
    auto inf = solve_inf(spec, 1.0);
    for (double a : {-3.0, 1.5})
        CHECK(max_abs(CMatrix(retransform(inf.grid, Complex{0.0, a}) - inf.phi_minus(Complex{a, 0.0}))) < 1e-8);
}

TEST_CASE("supremum transform rebuilt from the complement law") {
    std::mt19937_64 rng(11);
    for (auto spec : {benchmarks::two_state(), benchmarks::zero_drift_scalar(), testing::random_model(rng, 3)}) {
        auto f = solve_sup(spec, 1.0);
        auto cross = phi_plus_general(f, alpha_probes(8, 3.0));
        CHECK(cross.max_deviation < 1e-4);
    }
}

TEST_CASE("fixed-point iterates decrease from the identity") {
    auto spec = benchmarks::two_state();
    auto f = solve_sup(spec, 1.0, no_grid());
    const auto& h = f.diagnostics.history;
    REQUIRE(h.size() > 3);
    for (std::size_t i = 2; i < h.size(); ++i) CHECK(h[i] < h[i - 1]);
    CHECK(!f.diagnostics.damped);
    // Off-diagonal entries start at zero and grow; the diagonal decreases from one.
    CHECK((Vector::Ones(2) - f.M.diagonal()).minCoeff() >= -1e-12);
    CHECK(f.M.minCoeff() >= 0.0);
}
