#include "doctest.h"

#include "fixtures.hpp"
#include "mawhf/model.hpp"

#include <cmath>

using namespace mawhf;

namespace {

ModelSpec symmetric_two_state() {
    ModelSpec s = ModelSpec::make(2);
    s.a << -1.0, -1.0;
    s.lambda << 1.0, 1.0;
    s.c << 2.0, 2.0;
    return s;
}

bool has_violation(const ValidationReport& rep, const std::string& field_prefix, const std::string& rule_part) {
    for (const auto& v : rep.violations)
        if (v.field.rfind(field_prefix, 0) == 0 && v.rule.find(rule_part) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("validate_model accepts the symmetric two-state model") {
    CHECK(validate_model(symmetric_two_state()).ok());
}

TEST_CASE("validate_model rejects a positive drift") {
    auto s = symmetric_two_state();
    s.a(0) = 0.5;
    auto rep = validate_model(s);
    CHECK_FALSE(rep.ok());
    CHECK(has_violation(rep, "a[0]", "drift must be negative"));
}

TEST_CASE("validate_model rejects a non-stochastic embedded row") {
    auto s = symmetric_two_state();
    s.embedded(0, 1) = 0.9;
    auto rep = validate_model(s);
    CHECK(has_violation(rep, "embedded", "row stochasticity"));
}

TEST_CASE("validate_model edge cases") {
    SUBCASE("Brownian part") {
        auto s = symmetric_two_state();
        s.b2 = Vector::Zero(2);
        s.b2(1) = 0.1;
        CHECK(has_violation(validate_model(s), "b2[1]", "Brownian"));
    }
    SUBCASE("reducible chain") {
        auto s = ModelSpec::make(3);
        s.embedded << 0, 1, 0, 1, 0, 0, 0.5, 0.5, 0;
        CHECK(has_violation(validate_model(s), "embedded", "irreducible"));
    }
    SUBCASE("mixture mass") {
        auto s = benchmarks::scalar(-1.0, 1.0, 2.0, 0.5, 1.0);
        s.neg_jump[0].components[0].weight = 0.9;
        CHECK(has_violation(validate_model(s), "neg_jump[0]", "sum to 1"));
    }
    SUBCASE("missing downward law") {
        auto s = benchmarks::scalar(-1.0, 1.0, 2.0, 0.5, 1.0);
        s.neg_jump[0].components.clear();
        CHECK(has_violation(validate_model(s), "neg_jump[0]", "no components"));
    }
    SUBCASE("upward atom") {
        auto s = benchmarks::scalar(-1.0, 1.0, 2.0, 0.5, 1.0);
        s.neg_jump[0].components[0] = {1.0, MixtureComponent::Kind::atom, 0.5, 1.0, 1};
        CHECK(has_violation(validate_model(s), "neg_jump[0]", "half-line"));
    }
    SUBCASE("zero drift needs a = 0 everywhere and some motion") {
        auto s = benchmarks::zero_drift_scalar();
        CHECK(validate_model(s).ok());
        s.a(0) = -1.0;
        CHECK(has_violation(validate_model(s), "a[0]", "zero_drift"));
        s.a(0) = 0.0;
        s.lambda(0) = 0.0;
        CHECK(has_violation(validate_model(s), "zero_drift", "identically zero"));
    }
}

TEST_CASE("build_generator") {
    SUBCASE("alternating chain") {
        auto s = ModelSpec::make(2);
        Matrix q = build_generator(s);
        Matrix expect(2, 2);
        expect << -1, 1, 1, -1;
        CHECK(max_abs(Matrix(q - expect)) == 0.0);
    }
    SUBCASE("single state") {
        CHECK(build_generator(ModelSpec::make(1))(0, 0) == 0.0);
    }
    SUBCASE("general rates") {
        auto s = ModelSpec::make(2);
        s.nu << 2.0, 3.0;
        s.embedded << 0.5, 0.5, 0.25, 0.75;
        Matrix expect(2, 2);
        expect << -1, 1, 0.75, -0.75;
        CHECK(max_abs(Matrix(build_generator(s) - expect)) < 1e-15);
    }
}

TEST_CASE("resolvent_Ps") {
    SUBCASE("single state is the identity") {
        for (double s : {0.1, 1.0, 10.0}) CHECK(resolvent_Ps(ModelSpec::make(1), s)(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("hand-inverted two-state value") {
        // (I - Q) = [[2,-1],[-1,2]] has inverse (1/3)[[2,1],[1,2]].
        Matrix expect(2, 2);
        expect << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
        CHECK(max_abs(Matrix(resolvent_Ps(ModelSpec::make(2), 1.0) - expect)) < 1e-15);
    }
    SUBCASE("large s approaches the identity") {
        Matrix p = resolvent_Ps(ModelSpec::make(3), 1e8);
        CHECK(max_abs(Matrix(p - Matrix::Identity(3, 3))) < 1e-7);
    }
    SUBCASE("s must be positive") {
        CHECK_THROWS_AS(resolvent_Ps(ModelSpec::make(2), 0.0), DomainError);
    }
}

TEST_CASE("stationary_distribution") {
    SUBCASE("symmetric chain") {
        auto st = stationary_distribution(symmetric_two_state());
        CHECK(st.pi(0) == doctest::Approx(0.5));
        CHECK(st.pi(1) == doctest::Approx(0.5));
    }
    SUBCASE("asymmetric chain, pi Q = 0 solved by hand") {
        auto s = ModelSpec::make(2);
        s.nu << 2.0, 3.0;
        s.embedded << 0.5, 0.5, 0.25, 0.75;
        auto st = stationary_distribution(s);
        CHECK(st.pi(0) == doctest::Approx(3.0 / 7).epsilon(1e-14));
        CHECK(st.pi(1) == doctest::Approx(4.0 / 7).epsilon(1e-14));
        CHECK(max_abs(Matrix(st.pi * build_generator(s))) < 1e-14);
    }
    SUBCASE("scalar mean drift") {
        auto st = stationary_distribution(benchmarks::scalar(-1.0, 3.0, 2.0));
        CHECK(st.m1 == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("switch jumps contribute nu_k p_kr E chi") {
        auto s = ModelSpec::make(2);
        s.a << -1.0, -1.0;
        s.switch_jump[0][1].atom0 = 0.5;
        s.switch_jump[0][1].neg.components.push_back({1.0, MixtureComponent::Kind::erlang, 0.0, 2.0, 2});
        auto st = stationary_distribution(s);
        // E chi_01 = 0.5 * (-2/2) = -0.5
        CHECK(st.m_kr(0, 1) == doctest::Approx(-0.5));
        CHECK(st.m1 == doctest::Approx(-1.0 + 0.5 * -0.5));
        CHECK(max_abs(Matrix(st.P0.row(0) - st.pi)) == 0.0);
    }
}

TEST_CASE("mirror_model") {
    auto s = benchmarks::scalar(-1.0, 1.0, 2.0);
    auto mir = mirror_model(s);
    CHECK(mir.orientation == Orientation::lower);
    CHECK(mir.a(0) == 1.0);
    CHECK(validate_model(mir).ok());
    CHECK(model_to_json(mirror_model(mir)) == model_to_json(s));
}

TEST_CASE("model invariants over random models") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 1 + trial % 4;
        auto spec = testing::random_model(rng, m, {trial % 3 == 0, true});
        REQUIRE(validate_model(spec).ok());
        Matrix q = build_generator(spec);
        CHECK(max_abs(Matrix(q.rowwise().sum())) < 1e-12);
        for (double s : {0.1, 1.0, 10.0}) {
            Matrix p = resolvent_Ps(spec, s);
            CHECK(max_abs(Matrix(p.rowwise().sum().array() - 1.0)) < 1e-12);
            CHECK(p.minCoeff() >= -1e-15);
        }
        auto st = stationary_distribution(spec);
        CHECK(max_abs(Matrix(resolvent_Ps(spec, 1e-6) - st.P0)) < 1e-4);
        auto mst = stationary_distribution(mirror_model(spec));
        CHECK(std::abs(mst.m1 + st.m1) < 1e-12);
        // JSON round trip preserves the model exactly.
        CHECK(model_to_json(model_from_json(model_to_json(spec))) == model_to_json(spec));
        CHECK(model_to_json(mirror_model(mirror_model(spec))) == model_to_json(spec));
    }
}

TEST_CASE("model JSON errors are reported, not crashed on") {
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"m": 2})")), DomainError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"([1,2,3])")), DomainError);
    auto j = model_to_json(benchmarks::two_state());
    j["mawhf_schema"] = 99;
    CHECK_THROWS_AS(model_from_json(j), DomainError);
    j = model_to_json(benchmarks::two_state());
    j["neg_jump"] = nlohmann::json::array({nlohmann::json::array({{{"w", 1.0}, {"kind", "cauchy"}}}), nlohmann::json::array()});
    CHECK_THROWS_AS(model_from_json(j), DomainError);
}
