#include "mawhf/benchmarks.hpp"

namespace mawhf::benchmarks {

ModelSpec scalar(double a, double lambda, double c, double pos_weight, double neg_rate) {
    ModelSpec s = ModelSpec::make(1);
    s.a(0) = a;
    s.lambda(0) = lambda;
    s.c(0) = c;
    s.pos_weight(0) = pos_weight;
    if (pos_weight < 1.0) s.neg_jump[0].components.push_back({1.0, MixtureComponent::Kind::erlang, 0.0, neg_rate, 1});
    return s;
}

ModelSpec two_state() {
    ModelSpec s = ModelSpec::make(2);
    s.a << -1.0, -0.5;
    s.lambda << 1.0, 2.0;
    s.c << 2.0, 3.0;
    return s;
}

ModelSpec two_state_ruin() {
    ModelSpec s = ModelSpec::make(2);
    s.a << -1.0, -0.5;
    s.lambda << 3.0, 2.0;
    s.c << 2.0, 1.0;
    return s;
}

ModelSpec zero_drift_scalar() {
    ModelSpec s = scalar(0.0, 3.0, 2.0);
    s.zero_drift = true;
    return s;
}

}  // namespace mawhf::benchmarks
