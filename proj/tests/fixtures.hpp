#pragma once

#include "mawhf/benchmarks.hpp"
#include "mawhf/model.hpp"

#include <random>

namespace mawhf::testing {

struct RandomModelOptions {
    bool with_atoms = false;
    bool with_switch_jumps = true;
};

/// Random valid upper model with m states; Erlang mixtures for downward jumps.
inline ModelSpec random_model(std::mt19937_64& rng, int m, RandomModelOptions opt = {}) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
    auto erlang_mix = [&]() {
        NegativeMixture mix;
        const int n = 1 + static_cast<int>(u01(rng) * 2.0);
        double left = 1.0;
        for (int i = 0; i < n; ++i) {
            const double w = i + 1 == n ? left : left * uni(0.3, 0.7);
            left -= w;
            if (opt.with_atoms && u01(rng) < 0.4) {
                mix.components.push_back({w, MixtureComponent::Kind::atom, -uni(0.2, 1.5), 1.0, 1});
            } else {
                mix.components.push_back({w, MixtureComponent::Kind::erlang, 0.0, uni(0.7, 3.0), 1 + static_cast<int>(u01(rng) * 3.0)});
            }
        }
        // keep weights summing to one exactly up to rounding
        double tot = mix.total_weight();
        for (auto& c : mix.components) c.weight /= tot;
        return mix;
    };

    ModelSpec s = ModelSpec::make(m);
    for (int k = 0; k < m; ++k) {
        s.nu(k) = uni(0.5, 2.0);
        s.a(k) = -uni(0.3, 1.5);
        s.lambda(k) = uni(0.5, 3.0);
        s.c(k) = uni(1.0, 4.0);
        s.pos_weight(k) = uni(0.3, 1.0);
        s.neg_jump[k] = erlang_mix();
    }
    if (m > 1) {
        for (int k = 0; k < m; ++k) {
            double tot = 0.0;
            for (int r = 0; r < m; ++r) {
                s.embedded(k, r) = r == k ? 0.0 : uni(0.1, 1.0);
                tot += s.embedded(k, r);
            }
            s.embedded.row(k) /= tot;
            s.embedded(k, (k + 1) % m) += 1.0 - s.embedded.row(k).sum();
            if (opt.with_switch_jumps) {
                for (int r = 0; r < m; ++r) {
                    if (r == k) continue;
                    auto& law = s.switch_jump[k][r];
                    law.atom0 = uni(0.3, 1.0);
                    law.neg = erlang_mix();
                }
            }
        }
    }
    return s;
}

}  // namespace mawhf::testing
