#include "mawhf/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace mawhf {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ mix64(stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t SplitMix64::next() { return mix64(state_ += 0x9E3779B97F4A7C15ULL); }

double SplitMix64::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double SplitMix64::exponential(double rate) { return -std::log(uniform()) / rate; }

namespace {

double sample_mixture(const NegativeMixture& mix, int side, SplitMix64& rng) {
    double u = rng.uniform() * mix.total_weight();
    const MixtureComponent* pick = &mix.components.back();
    for (const auto& c : mix.components) {
        if (u < c.weight) {
            pick = &c;
            break;
        }
        u -= c.weight;
    }
    if (pick->kind == MixtureComponent::Kind::atom) return pick->location;
    double g = 0.0;
    for (int i = 0; i < pick->shape; ++i) g += rng.exponential(pick->rate);
    return side * g;
}

class PathSimulator {
public:
    PathSimulator(const ModelSpec& spec, const SimOptions& opt) : spec_(spec), opt_(opt) {
        sigma_ = orientation_sign(spec.orientation);
    }

    TrajectoryRecord run(std::size_t index) const {
        SplitMix64 rng(opt_.seed, index);
        TrajectoryRecord rec;
        int k = opt_.initial_state >= 0 ? opt_.initial_state : static_cast<int>(index % static_cast<std::size_t>(spec_.m));
        rec.state_initial = k;
        rec.levels.assign(opt_.levels.size(), LevelRecord{});
        const double horizon = opt_.fixed_horizon > 0.0 ? opt_.fixed_horizon : rng.exponential(opt_.s);
        rec.horizon = horizon;
        double t = 0.0, xi = 0.0;
        for (;;) {
            const double rate = spec_.nu(k) + spec_.lambda(k);
            const double dt = rate > 0.0 ? rng.exponential(rate) : std::numeric_limits<double>::infinity();
            if (t + dt >= horizon) {
                drift(rec, t, xi, k, horizon - t);
                break;
            }
            drift(rec, t, xi, k, dt);
            t += dt;
            if (rng.uniform() * rate < spec_.nu(k)) {
                const int r = pick_state(k, rng);
                const SwitchJumpLaw& law = spec_.switch_jump[k][r];
                double jump = 0.0;
                if (law.atom0 < 1.0 && rng.uniform() >= law.atom0) jump = sample_mixture(law.neg, -sigma_, rng);
                k = r;
                apply_jump(rec, t, xi, k, jump);
            } else {
                double jump;
                if (rng.uniform() < spec_.pos_weight(k)) jump = sigma_ * rng.exponential(spec_.c(k));
                else jump = sample_mixture(spec_.neg_jump[k], -sigma_, rng);
                apply_jump(rec, t, xi, k, jump);
            }
        }
        rec.xi_final = xi;
        rec.state_final = k;
        return rec;
    }

private:
    int pick_state(int k, SplitMix64& rng) const {
        double u = rng.uniform();
        const int m = spec_.m;
        for (int r = 0; r < m; ++r) {
            const double p = spec_.embedded(k, r);
            if (u < p) return r;
            u -= p;
        }
        for (int r = m - 1; r >= 0; --r)
            if (spec_.embedded(k, r) > 0.0) return r;
        return k;
    }

    // Linear segment: extrema and continuous crossings are exact at the ends.
    void drift(TrajectoryRecord& rec, double t, double& xi, int k, double dt) const {
        const double a = spec_.a(k);
        const double y1 = xi + a * dt;
        if (a != 0.0) {
            for (std::size_t i = 0; i < opt_.levels.size(); ++i) {
                LevelRecord& lv = rec.levels[i];
                const double x = opt_.levels[i];
                if (lv.crossed()) continue;
                if ((x > 0.0 && a > 0.0 && y1 > x) || (x < 0.0 && a < 0.0 && y1 < x)) {
                    lv.tau = t + (x - xi) / a;
                    lv.state = k;
                }
            }
        }
        xi = y1;
        rec.sup = std::max(rec.sup, xi);
        rec.inf = std::min(rec.inf, xi);
    }

    void apply_jump(TrajectoryRecord& rec, double t, double& xi, int k, double jump) const {
        const double before = xi;
        xi += jump;
        for (std::size_t i = 0; i < opt_.levels.size(); ++i) {
            LevelRecord& lv = rec.levels[i];
            const double x = opt_.levels[i];
            if (lv.crossed()) continue;
            if (x > 0.0 && xi > x) {
                lv = {t, xi - x, x - before, k};
            } else if (x < 0.0 && xi < x) {
                lv = {t, x - xi, before - x, k};
            }
        }
        rec.sup = std::max(rec.sup, xi);
        rec.inf = std::min(rec.inf, xi);
    }

    const ModelSpec& spec_;
    const SimOptions& opt_;
    int sigma_ = 1;
};

}  // namespace

SimBatch simulate_paths(const ModelSpec& spec, const SimOptions& opt) {
    require_valid(spec);
    if (opt.n < 1) throw DomainError("simulate: n must be >= 1");
    if (opt.fixed_horizon <= 0.0 && !(opt.s > 0.0)) throw DomainError("simulate: s must be positive");
    if (opt.initial_state >= spec.m) throw DomainError("simulate: initial state out of range");
    for (double x : opt.levels)
        if (x == 0.0 || !std::isfinite(x)) throw DomainError("simulate: levels must be finite and non-zero");

    SimBatch batch;
    batch.spec = spec;
    batch.s = opt.s;
    batch.n = opt.n;
    batch.seed = opt.seed;
    batch.fixed_horizon = opt.fixed_horizon;
    batch.levels = opt.levels;
    unsigned workers = opt.workers > 0 ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, opt.n));
    batch.workers = workers;
    batch.paths.resize(opt.n);

    const PathSimulator sim(spec, opt);
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < opt.n; i += workers) batch.paths[i] = sim.run(i);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    const int m = spec.m;
    batch.started_in.assign(m, 0);
    batch.occupation = Matrix::Zero(m, m);
    for (const auto& p : batch.paths) {
        ++batch.started_in[p.state_initial];
        batch.occupation(p.state_initial, p.state_final) += 1.0;
    }
    for (int k = 0; k < m; ++k)
        if (batch.started_in[k] > 0) batch.occupation.row(k) /= static_cast<double>(batch.started_in[k]);
    return batch;
}

EmpiricalMatrix SimBatch::estimate(const std::function<bool(const TrajectoryRecord&)>& pred) const {
    const int m = spec.m;
    EmpiricalMatrix e;
    e.value = Matrix::Zero(m, m);
    e.half_width = Matrix::Zero(m, m);
    e.count = started_in;
    for (const auto& p : paths)
        if (pred(p)) e.value(p.state_initial, p.state_final) += 1.0;
    const double z = normal_two_sided_quantile(0.01);
    for (int k = 0; k < m; ++k) {
        if (started_in[k] == 0) continue;
        const double nk = static_cast<double>(started_in[k]);
        e.value.row(k) /= nk;
        for (int r = 0; r < m; ++r) {
            const double v = e.value(k, r);
            e.half_width(k, r) = z * std::sqrt(v * (1.0 - v) / nk);
        }
    }
    return e;
}

double long_horizon(const ModelSpec& spec) {
    const double m1 = stationary_distribution(spec).m1;
    if (!(m1 > 0.0)) throw DomainError("long_horizon: requires m1 > 0");
    return 50.0 / m1;
}

double normal_two_sided_quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("normal quantile: alpha must be in (0, 1)");
    double lo = 0.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::erfc(mid / std::sqrt(2.0)) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

bool functional_event(Functional f, const TrajectoryRecord& p, double x) {
    switch (f) {
        case Functional::sup_tail: return p.sup > x;
        case Functional::check_tail: return p.xi_final - p.inf > x;
        case Functional::xi_cdf: return p.xi_final < x;
        case Functional::inf_cdf: return p.inf < x;
        case Functional::complement_cdf: return p.xi_final - p.sup < x;
    }
    return false;
}

std::string functional_name(Functional f) {
    switch (f) {
        case Functional::sup_tail: return "sup_tail";
        case Functional::check_tail: return "check_tail";
        case Functional::xi_cdf: return "xi_cdf";
        case Functional::inf_cdf: return "inf_cdf";
        case Functional::complement_cdf: return "complement_cdf";
    }
    return "unknown";
}

CompareReport compare_report(const SimBatch& batch, const std::vector<CurveRequest>& requests, double level) {
    if (batch.paths.empty()) throw DomainError("compare_report: empty batch");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("compare_report: level must be in (0, 1)");
    const int m = batch.spec.m;
    CompareReport rep;
    rep.level = level;
    for (const auto& req : requests) {
        if (req.probes.empty()) throw DomainError("compare_report: a curve has no probe points");
        CurveComparison cc;
        cc.functional = req.functional;
        for (double x : req.probes) {
            ProbeComparison pc;
            pc.x = x;
            pc.analytic = req.curve(x);
            if (pc.analytic.rows() != m || pc.analytic.cols() != m)
                throw DomainError("compare_report: analytic curve does not match the model dimension");
            pc.empirical = batch.estimate([&](const TrajectoryRecord& p) { return functional_event(req.functional, p, x); }).value;
            pc.z = Matrix::Zero(m, m);
            for (int k = 0; k < m; ++k) {
                const double nk = static_cast<double>(batch.started_in[k]);
                if (nk == 0.0) continue;
                for (int r = 0; r < m; ++r) {
                    const double a = std::clamp(pc.analytic(k, r), 0.0, 1.0);
                    const double diff = pc.empirical(k, r) - pc.analytic(k, r);
                    const double var = a * (1.0 - a) / nk;
                    cc.kolmogorov = std::max(cc.kolmogorov, std::abs(diff));
                    if (var > 0.0) {
                        pc.z(k, r) = diff / std::sqrt(var);
                        ++rep.tests;
                    } else if (std::abs(diff) > 0.5 / nk) {
                        pc.z(k, r) = std::numeric_limits<double>::infinity();
                        ++rep.tests;
                    }
                    cc.max_abs_z = std::max(cc.max_abs_z, std::abs(pc.z(k, r)));
                }
            }
            cc.probes.push_back(std::move(pc));
        }
        rep.curves.push_back(std::move(cc));
    }
    rep.critical_z = normal_two_sided_quantile((1.0 - level) / static_cast<double>(std::max<std::size_t>(rep.tests, 1)));
    for (const auto& cc : rep.curves)
        if (cc.max_abs_z > rep.critical_z) rep.pass = false;
    return rep;
}

}  // namespace mawhf
