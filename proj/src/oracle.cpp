#include "mawhf/oracle.hpp"

#include <chrono>
#include <cmath>
#include <memory>

namespace mawhf {

namespace {

double smallest_rate(const Matrix& d) {
    Eigen::EigenSolver<Matrix> es(d, false);
    return es.eigenvalues().real().minCoeff();
}

std::vector<double> scaled_probes(double scale, int count) {
    static const double base[] = {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> out;
    const int limit = static_cast<int>(std::size(base));
    for (int i = 0; i < count; ++i) {
        // Beyond the table, continue geometrically.
        const double f = i < limit ? base[i] : base[limit - 1] * std::pow(1.25, i - limit + 1);
        out.push_back(scale * f);
    }
    return out;
}

std::vector<double> negated(std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

OracleComparison compare_horizon_laws(const ModelSpec& spec, double s, const OracleOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto sup = std::make_shared<SupFactorization>(solve_sup(spec, s));
    auto inf = std::make_shared<InfFactorization>(solve_inf(spec, s));
    auto xi = std::make_shared<GriddedDistribution>(invert_xi_distribution(spec, s));

    const double up_scale = 1.0 / smallest_rate(spec.orientation == Orientation::upper ? sup->D_sup : inf->D_inf);
    const double down_scale = 1.0 / smallest_rate(spec.orientation == Orientation::upper ? inf->D_inf : sup->D_sup);
    const double scale = std::max(up_scale, down_scale);
    const std::vector<double> pos = scaled_probes(scale, opt.probes);
    std::vector<double> mixed;
    const int half = opt.probes / 2;
    for (double x : scaled_probes(scale, half)) mixed.push_back(-x);
    for (double x : scaled_probes(scale, opt.probes - half)) mixed.push_back(x);

    OracleComparison out;
    out.s = s;
    out.requests = {
        {Functional::sup_tail, [sup](double x) { return sup->sup_tail(x); }, pos},
        {Functional::check_tail, [inf](double x) { return inf->check_tail(x); }, pos},
        {Functional::xi_cdf, [xi](double x) { return xi->at(x); }, mixed},
        {Functional::complement_cdf, [sup](double x) { return sup->complement_cdf(x); }, negated(pos)},
        {Functional::inf_cdf, [inf](double x) { return inf->inf_cdf(x); }, negated(pos)},
    };
    SimOptions so;
    so.s = s;
    so.n = opt.n;
    so.seed = opt.seed;
    so.workers = opt.workers;
    const SimBatch batch = simulate_paths(spec, so);
    out.report = compare_report(batch, out.requests, opt.level);
    out.seconds = seconds_since(t0);
    return out;
}

OracleComparison compare_all_time_infimum(const ModelSpec& spec, const OracleOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    RuinOptions ro;
    ro.cross_check = false;
    auto curve = std::make_shared<RuinCurve>(ruin_curve(spec, {-1.0}, ro));
    const double scale = std::isnan(curve->decay_root) ? 1.0 : -1.0 / curve->decay_root;
    const std::vector<double> probes = negated(scaled_probes(scale, opt.probes));
    if (-probes.back() > -curve->grid.x_min) throw NumericalError("compare_all_time_infimum: probes exceed the ruin grid");

    OracleComparison out;
    out.s = 0.0;
    out.requests = {{Functional::inf_cdf, [curve](double x) { return curve->grid.at(x); }, probes}};
    SimOptions so;
    so.n = opt.n;
    so.seed = opt.seed;
    so.workers = opt.workers;
    so.fixed_horizon = long_horizon(spec);
    const SimBatch batch = simulate_paths(spec, so);
    // The chain at the horizon is close to stationary; the curve carries P0.
    out.report = compare_report(batch, out.requests, opt.level);
    out.seconds = seconds_since(t0);
    return out;
}

}  // namespace mawhf
