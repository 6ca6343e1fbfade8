#include "doctest.h"

#include "fixtures.hpp"
#include "mawhf/spectral.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace mawhf;

namespace {

const Complex I{0.0, 1.0};

// K(u) for the one-state model with drift a and Exp(c) jumps at rate lambda.
double scalar_K(double a, double lambda, double c, double u) { return a * u + lambda * (c / (c - u) - 1.0); }

}  // namespace

TEST_CASE("scalar cumulant matches the closed form") {
    CumulantEvaluator ev(benchmarks::scalar(-1.0, 3.0, 2.0));
    CHECK(ev.eval_K(1.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    for (double u : {-5.0, -0.3, 0.0, 0.5, 1.9})
        CHECK(ev.eval_K(u)(0, 0) == doctest::Approx(scalar_K(-1.0, 3.0, 2.0, u)).epsilon(1e-14));
    CumulantEvaluator ev1(benchmarks::scalar(-1.0, 1.0, 2.0));
    CHECK(std::abs(ev1.eval_psi(-I)(0, 0)) < 1e-15);
    const Complex alpha{0.7, -0.2};
    const Complex u = I * alpha;
    const Complex expect = -u + 1.0 * (2.0 / (2.0 - u) - 1.0);
    CHECK(std::abs(ev1.eval_psi(alpha)(0, 0) - expect) < 1e-15);
}

TEST_CASE("strip bounds") {
    CumulantEvaluator ev(benchmarks::scalar(-1.0, 1.0, 2.0, 0.5, 1.5));
    CHECK(ev.strip_lo() == -1.5);
    CHECK(ev.strip_hi() == 2.0);
    CHECK_THROWS_AS(ev.eval_K(2.0), DomainError);
    CHECK_THROWS_AS(ev.eval_K(-1.6), DomainError);
    CumulantEvaluator mir(mirror_model(benchmarks::scalar(-1.0, 1.0, 2.0, 0.5, 1.5)));
    CHECK(mir.strip_lo() == -2.0);
    CHECK(mir.strip_hi() == 1.5);
    CumulantEvaluator pure(benchmarks::scalar(-1.0, 1.0, 2.0));
    CHECK(std::isinf(pure.strip_lo()));
}

TEST_CASE("Erlang and atom transforms") {
    auto spec = benchmarks::scalar(-1.0, 2.0, 3.0, 0.25, 1.0);
    spec.neg_jump[0].components = {{0.6, MixtureComponent::Kind::erlang, 0.0, 1.5, 2},
                                   {0.4, MixtureComponent::Kind::atom, -0.8, 1.0, 1}};
    CumulantEvaluator ev(spec);
    const double u = 0.7;
    const double neg = 0.6 * std::pow(1.5 / (1.5 + u), 2) + 0.4 * std::exp(-0.8 * u);
    const double expect = -u + 2.0 * (0.25 * 3.0 / (3.0 - u) + 0.75 * neg - 1.0);
    CHECK(ev.eval_K(u)(0, 0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("phi at alpha = 0 is the state resolvent") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto spec = testing::random_model(rng, 1 + trial % 4, {trial % 2 == 0, true});
        CumulantEvaluator ev(spec);
        for (double s : {0.2, 1.0, 5.0})
            CHECK(max_abs(CMatrix(ev.eval_phi(s, 0.0) - resolvent_Ps(spec, s).cast<Complex>())) < 1e-13);
        CHECK(max_abs(CMatrix(ev.eval_psi(0.0) - build_generator(spec).cast<Complex>())) < 1e-13);
    }
}

TEST_CASE("cumulant symmetries and derivative") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto spec = testing::random_model(rng, 1 + trial % 4, {trial % 2 == 0, true});
        CumulantEvaluator ev(spec);
        const Complex alpha{0.9 - 0.1 * trial, -0.2};
        CHECK(max_abs(CMatrix(ev.eval_psi(-std::conj(alpha)) - ev.eval_psi(alpha).conjugate())) < 1e-13);
        // dK/du at 0 equals the matrix of conditional means.
        const double h = 1e-5;
        Matrix d = (ev.eval_K(h) - ev.eval_K(-h)) / (2.0 * h);
        CHECK(max_abs(Matrix(d - stationary_distribution(spec).m_kr)) < 1e-8);
        // The mirror has K(-u).
        CumulantEvaluator mir(mirror_model(spec));
        CHECK(max_abs(Matrix(mir.eval_K(-0.3) - ev.eval_K(0.3))) < 1e-14);
    }
}

TEST_CASE("resolvent is singular at a spectral root") {
    CumulantEvaluator ev(benchmarks::scalar(-1.0, 3.0, 2.0));
    CHECK_THROWS_AS(ev.laplace_resolvent(2.0, 1.0), NumericalError);
    CHECK_THROWS_AS(ev.laplace_resolvent(0.0, 0.1), DomainError);
}

TEST_CASE("k0_tail") {
    CumulantEvaluator ev(benchmarks::scalar(-1.0, 3.0, 2.0));
    CHECK(ev.k0_tail(1.0)(0, 0) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-15));
    CumulantEvaluator mir(mirror_model(benchmarks::scalar(-1.0, 3.0, 2.0)));
    CHECK_THROWS_AS(mir.k0_tail(1.0), DomainError);
}

TEST_CASE("phi is the resolvent of the exponential semigroup") {
    std::mt19937_64 rng(5);
    auto spec = testing::random_model(rng, 2);
    CumulantEvaluator ev(spec);
    const double s = 1.5;
    for (double alpha : {-1.3, 0.4}) {
        const CMatrix psi = ev.eval_psi(alpha);
        // Simpson in t on [0, 40/s].
        const int n = 20000;
        const double h = 40.0 / s / n;
        const CMatrix step = CMatrix(h * psi).exp();
        CMatrix e = CMatrix::Identity(2, 2);
        CMatrix acc = CMatrix::Zero(2, 2);
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            acc += w * std::exp(-s * h * j) * e;
            e = e * step;
        }
        const CMatrix quad = s * h / 3.0 * acc;
        CHECK(max_abs(CMatrix(quad - ev.eval_phi(s, alpha))) < 1e-6);
    }
}

TEST_CASE("psi row sums and the real-argument cumulant") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 6; ++trial) {
        auto spec = testing::random_model(rng, 1 + trial % 3, {trial % 2 == 0, true});
        CumulantEvaluator ev(spec);
        CHECK(max_abs(Matrix(ev.eval_psi(0.0).real().rowwise().sum())) < 1e-12);
        const double alpha = 0.8;
        const CMatrix psi = ev.eval_psi(alpha);
        const CMatrix jumps = ev.jump_transform(I * alpha);
        for (int k = 0; k < spec.m; ++k) {
            const Complex drift = I * alpha * spec.a(k) - spec.lambda(k) - spec.nu(k);
            CHECK(std::abs(psi.row(k).sum() - (jumps.row(k).sum() + drift)) < 1e-12);
        }
        for (double r : {-0.3, 0.2}) CHECK(max_abs(CMatrix(ev.eval_K(r).cast<Complex>() - ev.eval_psi(-I * r))) < 1e-14);
    }
}

TEST_CASE("r K^{-1}(r) tends to P0 / m1") {
    auto spec = benchmarks::two_state_ruin();
    CumulantEvaluator ev(spec);
    const auto st = stationary_distribution(spec);
    const double r = 1e-7;
    CHECK(max_abs(Matrix(r * checked_inverse(ev.eval_K(r), "K") - st.P0 / st.m1)) < 1e-5);
}

TEST_CASE("continued cumulant beyond the exponential poles") {
    auto spec = benchmarks::scalar(-1.0, 3.0, 2.0);
    CumulantEvaluator ev(spec);
    CHECK_THROWS_AS(ev.laplace_exponent(Complex{3.0, 0.0}), DomainError);
    CHECK(ev.continued_exponent(Complex{3.0, 0.0})(0, 0).real() == doctest::Approx(scalar_K(-1.0, 3.0, 2.0, 3.0)));
    auto with_neg = benchmarks::scalar(-1.0, 3.0, 2.0, 0.5, 1.0);
    CHECK_THROWS_AS(CumulantEvaluator(with_neg).continued_exponent(Complex{-1.5, 0.0}), DomainError);
}

TEST_CASE("large s: phi is close to the identity") {
    auto spec = benchmarks::two_state();
    CumulantEvaluator ev(spec);
    const CMatrix phi = ev.eval_phi(1e3, 0.7);
    CHECK(max_abs(CMatrix(phi - CMatrix::Identity(2, 2))) < 1e-2);
    CHECK(std::abs(phi.row(0).sum()) <= 1.0 + 1e-12);
}
