#include "doctest.h"

#include "fixtures.hpp"
#include "mawhf/asymptotics.hpp"

#include <cmath>

using namespace mawhf;

TEST_CASE("extrapolation to zero is exact for polynomials") {
    std::vector<double> s{0.4, 0.2, 0.1, 0.05};
    std::vector<Matrix> v;
    for (double x : s) v.push_back(Matrix::Constant(1, 1, 2.0 - 3.0 * x + x * x * x));
    const Extrapolated e = extrapolate_to_zero(s, v);
    CHECK(e.value(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(extrapolate_to_zero({}, {}), DomainError);
}

TEST_CASE("scalar limit matrices and infimum transform") {
    auto spec = benchmarks::scalar(-1.0, 3.0, 2.0);
    const RCheckLimit lim = limit_R_check(spec);
    CHECK(lim.R_check(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(lim.discrepancy < 1e-4);
    CHECK(std::abs(lim.via_p_check(0, 0) - 1.0) < 1e-4);
    for (double r : {0.5, 1.0, 1.5}) CHECK(inf_transform_limit(spec, r)(0, 0) == doctest::Approx(1.0 / (1.0 + r)).epsilon(1e-6));
    CHECK(inf_transform_limit(spec, 1e-6)(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(inf_transform_limit(spec, 1e6)(0, 0) == doctest::Approx(0.0).epsilon(1e-5));
    CHECK_THROWS_AS(inf_transform_limit(spec, 2.0), NumericalError);
}

TEST_CASE("scalar ruin curve is exponential") {
    auto spec = benchmarks::scalar(-1.0, 3.0, 2.0);
    auto rc = ruin_curve(spec, {-0.5, -1.0, -2.0, -5.0});
    for (std::size_t i = 0; i < rc.x.size(); ++i) CHECK(rc.values[i](0, 0) == doctest::Approx(std::exp(rc.x[i])).epsilon(1e-8));
    CHECK(rc.decay_root == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(rc.cross_check_deviation >= 0.0);
    CHECK(rc.cross_check_deviation < 1e-3);
    CHECK(max_abs(rc.p_minus) == 0.0);
    CHECK(rc.grid.at(-1e-9)(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero-drift monotone model: no ruin, unit atom") {
    auto spec = benchmarks::zero_drift_scalar();
    auto z = zero_drift_atoms(spec, 1.0);
    REQUIRE(z.P0_tilde);
    REQUIRE(z.p_minus);
    CHECK((*z.P0_tilde)(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK((*z.p_minus)(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(limit_R_check(spec).R_check(0, 0) == doctest::Approx(3.0).epsilon(1e-6));
    auto rc = ruin_curve(spec, {-1.0});
    CHECK(std::abs(rc.values[0](0, 0)) < 1e-12);
    CHECK_THROWS_AS(zero_drift_atoms(benchmarks::scalar(-1.0, 3.0, 2.0)), DomainError);
}

TEST_CASE("no movement: the zero atom resolvent is the identity") {
    auto spec = benchmarks::zero_drift_scalar();
    spec.lambda(0) = 0.0;
    CHECK(zero_atom_resolvent(spec, 0.7)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("preconditions") {
    // Drifting to -infinity: the infimum is not proper.
    CHECK_THROWS_AS(limit_R_check(benchmarks::two_state()), DomainError);
    CHECK_THROWS_AS(ruin_curve(benchmarks::scalar(-1.0, 1.0, 2.0, 0.0), {-1.0}), DomainError);
    CHECK_THROWS_AS(ruin_curve(benchmarks::scalar(-1.0, 3.0, 2.0), {0.5}), DomainError);
    CHECK_THROWS_AS(inf_transform_limit(mirror_model(benchmarks::scalar(-1.0, 3.0, 2.0)), 1.0), DomainError);
}

TEST_CASE("two-state ruin: routes agree and the curve retransforms") {
    auto spec = benchmarks::two_state_ruin();
    const RCheckLimit lim = limit_R_check(spec);
    CHECK(lim.discrepancy < 1e-4);
    auto rc = ruin_curve(spec, {-0.25, -1.0, -3.0});
    CHECK(rc.cross_check_deviation < 1e-3);
    for (std::size_t i = 1; i < rc.grid.size(); ++i) CHECK((rc.grid.values[i] - rc.grid.values[i - 1]).minCoeff() > -1e-10);
    // Row sums at 0- approach one minus the atom.
    const Matrix near0 = rc.grid.at(-1e-9);
    for (int k = 0; k < 2; ++k) CHECK(near0.row(k).sum() == doctest::Approx(1.0 - rc.p_minus.row(k).sum()).epsilon(1e-6));
    for (double r : {0.5, 1.5, 2.5}) {
        const Matrix direct = inf_transform_limit(spec, r);
        const Matrix from_curve = stieltjes_minus(rc.grid, Complex{r, 0.0}).real();
        CHECK(max_abs(Matrix(direct - from_curve)) < 1e-3);
    }
}

TEST_CASE("scaling covariance of the ruin curve") {
    auto spec = benchmarks::two_state_ruin();
    const double sigma = 2.0;
    ModelSpec scaled = spec;
    scaled.a *= sigma;
    scaled.c /= sigma;
    auto base = ruin_curve(spec, {-0.5, -1.0, -2.0});
    auto big = ruin_curve(scaled, {-1.0, -2.0, -4.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(max_abs(Matrix(big.values[i] - base.values[i])) < 1e-8);
}
