#include "doctest.h"

#include "fixtures.hpp"
#include "mawhf/projection.hpp"

#include <cmath>

using namespace mawhf;

namespace {

// One state, drift a < 0, Exp(c) jumps at rate lambda: s - K(u) vanishes at
// the roots of u^2 - (c - s - lambda/|a|... ) written out below for |a| = 1.
struct ScalarRoots {
    double r1, r2;
};

ScalarRoots scalar_roots(double lambda, double c, double s) {
    // (s + u)(c - u) - lambda u = 0  <=>  u^2 - (c - s - lambda) u - s c = 0
    const double b = c - s - lambda;
    const double disc = std::sqrt(b * b + 4.0 * s * c);
    return {0.5 * (b - disc), 0.5 * (b + disc)};
}

}  // namespace

TEST_CASE("crossings of the Perron root") {
    const double lambda = 1.0, c = 2.0, s = 1.0;
    CumulantEvaluator ev(benchmarks::scalar(-1.0, lambda, c));
    CanonicalView view(ev, 1, s);
    auto roots = scalar_roots(lambda, c, s);
    CHECK(view.u_minus() == doctest::Approx(roots.r1).epsilon(1e-13));
    CHECK(view.u_plus() == doctest::Approx(roots.r2).epsilon(1e-13));
    CHECK_THROWS_AS(CanonicalView(ev, -1, s), DomainError);

    CumulantEvaluator mir(mirror_model(benchmarks::scalar(-1.0, lambda, c)));
    CanonicalView mview(mir, -1, s);
    CHECK(mview.u_minus() == doctest::Approx(roots.r1).epsilon(1e-13));
    CHECK(max_abs(CMatrix(mview.L(Complex{0.3, 0.4}) - view.L(Complex{0.3, 0.4}))) < 1e-15);
}

TEST_CASE("half-line projection against partial fractions") {
    for (double s : {0.05, 1.0, 7.0}) {
        const double lambda = 1.0, c = 2.0;
        CumulantEvaluator ev(benchmarks::scalar(-1.0, lambda, c));
        CanonicalView view(ev, 1, s);
        HalfLineProjector proj(view);
        auto [r1, r2] = scalar_roots(lambda, c, s);
        // L(u) = -s (c - u) / ((u - r1)(u - r2)); keep the pole at r1 < 0.
        const double res_plain = -s * (c - r1) / (r1 - r2);
        const double res_left = -s / (r1 - r2);
        for (Complex u0 : {Complex{0.0, 0.0}, Complex{2.0, 0.0}, Complex{0.5, -3.0}, Complex{0.3 * r1, 1.0}}) {
            auto a = proj.minus(u0, HalfLineProjector::Kind::plain);
            CHECK(std::abs(a.value(0, 0) - res_plain / (u0 - r1)) < 1e-12);
            auto b = proj.minus(u0, HalfLineProjector::Kind::left);
            CHECK(std::abs(b.value(0, 0) - res_left / (u0 - r1)) < 1e-12);
            auto br = proj.minus(u0, HalfLineProjector::Kind::right);
            CHECK(std::abs(br.value(0, 0) - b.value(0, 0)) < 1e-14);
        }
        CHECK_THROWS_AS(proj.minus(Complex{r1, 0.0}, HalfLineProjector::Kind::plain), DomainError);
    }
}

TEST_CASE("zero-drift model keeps its mass at zero") {
    CumulantEvaluator ev(benchmarks::zero_drift_scalar());
    CanonicalView view(ev, 1, 1.0);
    CHECK(view.atom0()(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(zero_atom_resolvent(ev.spec(), 1.0)(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    HalfLineProjector proj(view);
    auto a = proj.minus(Complex{0.4, 0.0}, HalfLineProjector::Kind::plain);
    CHECK(std::abs(a.value(0, 0)) < 1e-13);
    CHECK(std::abs(proj.minus_closed(Complex{0.4, 0.0})(0, 0) - 0.25) < 1e-13);
}

TEST_CASE("projection sanity over random models") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 8; ++trial) {
        const int m = 1 + trial % 3;
        auto spec = testing::random_model(rng, m, {false, true});
        CumulantEvaluator ev(spec);
        CanonicalView view(ev, 1, 0.7);
        HalfLineProjector proj(view);
        Matrix ps = view.Ps();
        // P{xi(theta_s) < 0, x = r} is a sub-stochastic piece of P_s.
        Matrix below = proj.minus(Complex{0.0, 0.0}, HalfLineProjector::Kind::plain).value.real();
        CHECK(below.minCoeff() > -1e-12);
        CHECK((ps - below).minCoeff() > -1e-12);
        // Monotone decreasing in real u0 > 0 and real-valued there.
        auto v1 = proj.minus(Complex{0.5, 0.0}, HalfLineProjector::Kind::plain).value;
        auto v2 = proj.minus(Complex{1.5, 0.0}, HalfLineProjector::Kind::plain).value;
        CHECK(max_abs(Matrix(v1.imag())) < 1e-13);
        CHECK((v1.real() - v2.real()).minCoeff() > -1e-13);
        // Conjugate symmetry.
        auto w1 = proj.minus(Complex{0.2, 1.3}, HalfLineProjector::Kind::left).value;
        auto w2 = proj.minus(Complex{0.2, -1.3}, HalfLineProjector::Kind::left).value;
        CHECK(max_abs(CMatrix(w1 - w2.conjugate())) < 1e-13);
    }
}
