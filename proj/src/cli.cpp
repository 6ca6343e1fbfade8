#include "mawhf/cli.hpp"

#include "mawhf/asymptotics.hpp"
#include "mawhf/benchmarks.hpp"
#include "mawhf/montecarlo.hpp"
#include "mawhf/oracle.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace mawhf::cli {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json to_json(const Matrix& a) {
    json rows = json::array();
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        json row = json::array();
        for (Eigen::Index r = 0; r < a.cols(); ++r) row.push_back(a(k, r));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const CMatrix& a) { return {{"re", to_json(Matrix(a.real()))}, {"im", to_json(Matrix(a.imag()))}}; }

json to_json(const FixedPointDiagnostics& d) {
    return {{"iterations", d.iterations},     {"residual", d.residual},         {"converged", d.converged},
            {"damped", d.damped},             {"direct_solve", d.direct_solve}, {"uniqueness_gap", d.uniqueness_gap}};
}

/// Collects the artifacts of one subcommand and writes them out.
class Emitter {
public:
    Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), start_(std::chrono::steady_clock::now()) {}

    json header(const std::string& kind) const {
        json h{{"schema", "mawhf." + kind}, {"schema_version", kSchemaVersion}};
        if (!cfg_.model_path.empty()) h["model"] = cfg_.model_path;
        if (!cfg_.deterministic) {
            const std::time_t now = std::time(nullptr);
            std::ostringstream ts;
            ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
            h["generated_at"] = ts.str();
        }
        return h;
    }

    void finish(json report, const std::string& kind, const std::string& csv_body = {}) {
        if (!cfg_.deterministic)
            report["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const bool with_csv = cfg_.csv && !csv_body.empty();
        if (cfg_.out_dir.empty()) {
            if (with_csv) out_ << "# " << report.dump() << "\n" << csv_body;
            else out_ << report.dump(2) << "\n";
            return;
        }
        std::filesystem::create_directories(cfg_.out_dir);
        const std::filesystem::path base = std::filesystem::path(cfg_.out_dir) / kind;
        write_file(base.string() + ".json", report.dump(2) + "\n");
        if (with_csv) write_file(base.string() + ".csv", "# " + report.dump() + "\n" + csv_body);
        out_ << base.string() << ".json\n";
    }

private:
    static void write_file(const std::string& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DomainError("cannot write '" + path + "'");
        f << body;
    }

    const RunConfig& cfg_;
    std::ostream& out_;
    std::chrono::steady_clock::time_point start_;
};

std::ostringstream csv_stream() {
    std::ostringstream os;
    os.precision(15);
    return os;
}

void csv_rows(std::ostream& os, const std::string& prefix, double x, const Matrix& v) {
    for (Eigen::Index k = 0; k < v.rows(); ++k)
        for (Eigen::Index r = 0; r < v.cols(); ++r) os << prefix << x << "," << k << "," << r << "," << v(k, r) << "\n";
}

GridParams grid_params(const RunConfig& cfg) {
    GridParams gp;
    if (cfg.grid_n) gp.n = *cfg.grid_n;
    if (cfg.x_span) gp.x_span = *cfg.x_span;
    return gp;
}

FactorizeOptions factorize_options(const RunConfig& cfg) {
    FactorizeOptions opt;
    if (cfg.grid_n) opt.grid.n = *cfg.grid_n;
    if (cfg.x_span) opt.grid.x_span = *cfg.x_span;
    return opt;
}

void require_positive_s(const RunConfig& cfg) {
    if (!(cfg.s > 0.0) || !std::isfinite(cfg.s)) throw DomainError("--s must be a positive number");
}

std::string orientation_name(Orientation o) { return o == Orientation::upper ? "upper" : "lower"; }

ModelSpec load_checked(const RunConfig& cfg) {
    if (cfg.model_path.empty()) throw DomainError("a model file is required");
    ModelSpec spec = load_model(cfg.model_path);
    require_valid(spec);
    return spec;
}

int cmd_validate(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    if (cfg.model_path.empty()) throw DomainError("a model file is required");
    const ModelSpec spec = load_model(cfg.model_path);
    const ValidationReport rep = validate_model(spec);
    json report = em.header("validate");
    report["valid"] = rep.ok();
    json violations = json::array();
    for (const auto& v : rep.violations) violations.push_back({{"field", v.field}, {"rule", v.rule}});
    report["violations"] = violations;
    if (!rep.ok()) {
        err << "invalid model:\n" << rep.to_string();
        em.finish(report, "validate");
        return kExitInvalid;
    }
    const DriftStats st = stationary_distribution(spec);
    report["m"] = spec.m;
    report["orientation"] = orientation_name(spec.orientation);
    report["zero_drift"] = spec.zero_drift;
    report["m1"] = st.m1;
    report["stationary"] = to_json(Matrix(st.pi));
    em.finish(report, "validate");
    return kExitOk;
}

void csv_complex_rows(std::ostream& os, const std::string& prefix, Complex alpha, const CMatrix& v) {
    for (Eigen::Index k = 0; k < v.rows(); ++k)
        for (Eigen::Index r = 0; r < v.cols(); ++r)
            os << prefix << alpha.real() << "," << alpha.imag() << "," << k << "," << r << "," << v(k, r).real() << ","
               << v(k, r).imag() << "\n";
}

int cmd_transform(const RunConfig& cfg, Emitter& em) {
    require_positive_s(cfg);
    const ModelSpec spec = load_checked(cfg);
    CumulantEvaluator ev(spec);
    const std::vector<double> alphas = cfg.x.empty() ? alpha_probes() : cfg.x;
    json report = em.header("transform");
    report["s"] = cfg.s;
    report["Ps"] = to_json(resolvent_Ps(spec, cfg.s));
    json rows = json::array();
    auto os = csv_stream();
    os << "function,re_alpha,im_alpha,k,r,re_value,im_value\n";
    for (double a : alphas) {
        const CMatrix psi = ev.eval_psi(Complex(a, 0.0));
        const CMatrix phi = ev.eval_phi(cfg.s, Complex(a, 0.0));
        rows.push_back({{"alpha", a}, {"psi", to_json(psi)}, {"phi", to_json(phi)}});
        csv_complex_rows(os, "psi,", Complex(a, 0.0), psi);
        csv_complex_rows(os, "phi,", Complex(a, 0.0), phi);
    }
    report["transform"] = rows;
    const GriddedDistribution d = invert_xi_distribution(spec, cfg.s, grid_params(cfg));
    report["grid"] = {{"x_min", d.x_min}, {"h", d.h}, {"nodes", d.size()}, {"error_estimate", d.error_estimate}};
    report["atom0"] = to_json(d.atom0);
    em.finish(report, "transform", os.str());
    return kExitOk;
}

int cmd_factorize(const RunConfig& cfg, Emitter& em) {
    require_positive_s(cfg);
    const ModelSpec spec = load_checked(cfg);
    FactorizeOptions opt = factorize_options(cfg);
    opt.build_grid = cfg.csv;
    const SupFactorization sup = solve_sup(spec, cfg.s, opt);
    const InfFactorization inf = solve_inf(spec, cfg.s, opt);
    const IdentityResiduals res = identity_residuals(spec, sup, inf, alpha_probes());
    json report = em.header("factorize");
    report["s"] = cfg.s;
    report["orientation"] = orientation_name(spec.orientation);
    report["Ps"] = to_json(sup.Ps);
    report["sup"] = {{"p_plus", to_json(sup.p_plus)},
                     {"q_plus", to_json(sup.q_plus)},
                     {"M", to_json(sup.M)},
                     {"D_sup", to_json(sup.D_sup)},
                     {"complement_atom", to_json(sup.complement_atom)},
                     {"diagnostics", to_json(sup.diagnostics)}};
    report["inf"] = {{"p_check_plus", to_json(inf.p_check_plus)},
                     {"q_check_plus", to_json(inf.q_check_plus)},
                     {"m_check", to_json(inf.m_check)},
                     {"D_inf", to_json(inf.D_inf)},
                     {"p_minus", to_json(inf.p_minus)},
                     {"diagnostics", to_json(inf.diagnostics)}};
    report["identity_residuals"] = {{"sup_form", res.sup_form}, {"inf_form", res.inf_form}, {"boundary", res.boundary}};
    std::string body;
    if (cfg.csv) {
        auto os = csv_stream();
        os << "law,x,k,r,value\n";
        const std::size_t stride = std::max<std::size_t>(cfg.csv_stride, 1);
        if (sup.has_grid)
            for (std::size_t j = 0; j < sup.grid.size(); j += stride) csv_rows(os, "sup_grid,", sup.grid.x(j), sup.grid.values[j]);
        if (inf.has_grid)
            for (std::size_t j = 0; j < inf.grid.size(); j += stride) csv_rows(os, "inf_grid,", inf.grid.x(j), inf.grid.values[j]);
        body = os.str();
    }
    em.finish(report, "factorize", body);
    return kExitOk;
}

std::vector<double> default_levels(const RunConfig& cfg, std::vector<double> fallback) {
    return cfg.x.empty() ? fallback : cfg.x;
}

int cmd_extrema(const RunConfig& cfg, Emitter& em) {
    require_positive_s(cfg);
    const ModelSpec spec = load_checked(cfg);
    FactorizeOptions opt = factorize_options(cfg);
    opt.build_grid = true;
    const SupFactorization sup = solve_sup(spec, cfg.s, opt);
    const InfFactorization inf = solve_inf(spec, cfg.s, opt);
    std::vector<double> xs = default_levels(cfg, {0.25, 0.5, 1.0, 2.0, 4.0});
    for (double& x : xs) x = std::abs(x);
    struct Law {
        const char* name;
        double sign;
        std::function<Matrix(double)> f;
    };
    const std::vector<Law> laws{
        {"sup_tail", 1.0, [&](double x) { return sup.sup_tail(x); }},
        {"check_tail", 1.0, [&](double x) { return inf.check_tail(x); }},
        {"complement_cdf", -1.0, [&](double x) { return sup.complement_cdf(x); }},
        {"inf_cdf", -1.0, [&](double x) { return inf.inf_cdf(x); }},
    };
    json report = em.header("extrema");
    report["s"] = cfg.s;
    report["p_plus"] = to_json(sup.p_plus);
    report["p_check_plus"] = to_json(inf.p_check_plus);
    report["p_minus"] = to_json(inf.p_minus);
    report["complement_atom"] = to_json(sup.complement_atom);
    auto os = csv_stream();
    os << "law,x,k,r,value\n";
    json curves = json::object();
    for (const auto& law : laws) {
        json pts = json::array();
        for (double x : xs) {
            const double at = law.sign * x;
            const Matrix v = law.f(at);
            pts.push_back({{"x", at}, {"value", to_json(v)}});
            csv_rows(os, std::string(law.name) + ",", at, v);
        }
        curves[law.name] = pts;
    }
    report["curves"] = curves;
    em.finish(report, "extrema", os.str());
    return kExitOk;
}

int cmd_ruin(const RunConfig& cfg, Emitter& em) {
    const ModelSpec spec = load_checked(cfg);
    std::vector<double> xs = default_levels(cfg, {-0.25, -0.5, -1.0, -2.0, -5.0, -10.0});
    for (double& x : xs) x = -std::abs(x);
    RuinOptions ro;
    if (cfg.grid_n) ro.n = *cfg.grid_n;
    if (cfg.x_span) ro.x_span = *cfg.x_span;
    const RuinCurve rc = ruin_curve(spec, xs, ro);
    json report = em.header("ruin");
    report["R_check"] = to_json(rc.R_check);
    report["p_minus"] = to_json(rc.p_minus);
    report["decay_root"] = std::isnan(rc.decay_root) ? json(nullptr) : json(rc.decay_root);
    report["limit"] = {{"s_values", rc.limit.s_values},
                       {"route_discrepancy", rc.limit.discrepancy},
                       {"extrapolation_error", rc.limit.extrapolation_error}};
    report["inversion_error"] = rc.inversion_error;
    report["cross_check_deviation"] = rc.cross_check_deviation;
    json pts = json::array();
    auto os = csv_stream();
    os << "x,k,r,value\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        pts.push_back({{"x", xs[i]}, {"value", to_json(rc.values[i])}});
        csv_rows(os, "", xs[i], rc.values[i]);
    }
    report["curve"] = pts;
    em.finish(report, "ruin", os.str());
    return kExitOk;
}

json level_summary(const SimBatch& b, std::size_t l) {
    const int m = b.spec.m;
    Matrix tau = Matrix::Zero(m, m), over = Matrix::Zero(m, m), under = Matrix::Zero(m, m), hits = Matrix::Zero(m, m);
    for (const auto& p : b.paths) {
        const auto& lv = p.levels[l];
        if (!lv.crossed()) continue;
        hits(p.state_initial, lv.state) += 1.0;
        tau(p.state_initial, lv.state) += lv.tau;
        over(p.state_initial, lv.state) += lv.overshoot;
        under(p.state_initial, lv.state) += lv.undershoot;
    }
    Matrix prob = hits;
    for (int k = 0; k < m; ++k) {
        if (b.started_in[k] > 0) prob.row(k) /= static_cast<double>(b.started_in[k]);
        for (int r = 0; r < m; ++r) {
            const double h = hits(k, r);
            tau(k, r) = h > 0.0 ? tau(k, r) / h : 0.0;
            over(k, r) = h > 0.0 ? over(k, r) / h : 0.0;
            under(k, r) = h > 0.0 ? under(k, r) / h : 0.0;
        }
    }
    return {{"x", b.levels[l]},
            {"crossing_probability", to_json(prob)},
            {"mean_tau", to_json(tau)},
            {"mean_overshoot", to_json(over)},
            {"mean_undershoot", to_json(under)}};
}

int cmd_simulate(const RunConfig& cfg, Emitter& em) {
    require_positive_s(cfg);
    const ModelSpec spec = load_checked(cfg);
    SimOptions so;
    so.s = cfg.s;
    so.n = cfg.n;
    so.seed = cfg.seed;
    so.workers = cfg.workers;
    so.levels = cfg.levels;
    const SimBatch b = simulate_paths(spec, so);
    json report = em.header("simulate");
    report["s"] = cfg.s;
    report["n"] = b.n;
    report["seed"] = b.seed;
    report["workers"] = b.workers;
    report["occupation"] = to_json(b.occupation);
    double sup = 0.0, inf = 0.0, xi = 0.0;
    for (const auto& p : b.paths) {
        sup += p.sup;
        inf += p.inf;
        xi += p.xi_final;
    }
    const double n = static_cast<double>(b.n);
    report["mean"] = {{"sup", sup / n}, {"inf", inf / n}, {"xi", xi / n}};
    json levels = json::array();
    for (std::size_t l = 0; l < b.levels.size(); ++l) levels.push_back(level_summary(b, l));
    report["levels"] = levels;
    auto os = csv_stream();
    os << "functional,x,k,r,value\n";
    const std::vector<double> grid = cfg.x.empty() ? std::vector<double>{0.1, 0.25, 0.5, 1.0, 2.0, 4.0} : cfg.x;
    for (Functional f : {Functional::sup_tail, Functional::check_tail, Functional::xi_cdf, Functional::complement_cdf,
                         Functional::inf_cdf}) {
        const double sign = (f == Functional::complement_cdf || f == Functional::inf_cdf) ? -1.0 : 1.0;
        for (double x0 : grid) {
            const double x = sign * std::abs(x0);
            const EmpiricalMatrix e = b.estimate([f, x](const TrajectoryRecord& p) { return functional_event(f, p, x); });
            csv_rows(os, functional_name(f) + ",", x, e.value);
        }
    }
    em.finish(report, "simulate", os.str());
    return kExitOk;
}

json to_json(const OracleComparison& o) {
    json curves = json::array();
    for (const auto& c : o.report.curves) {
        json probes = json::array();
        for (const auto& p : c.probes)
            probes.push_back({{"x", p.x}, {"analytic", to_json(p.analytic)}, {"empirical", to_json(p.empirical)}, {"z", to_json(p.z)}});
        curves.push_back({{"functional", functional_name(c.functional)},
                          {"kolmogorov", c.kolmogorov},
                          {"max_abs_z", c.max_abs_z},
                          {"probes", probes}});
    }
    return {{"level", o.report.level},
            {"tests", o.report.tests},
            {"critical_z", o.report.critical_z},
            {"pass", o.report.pass},
            {"curves", curves}};
}

int cmd_compare(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    require_positive_s(cfg);
    const ModelSpec spec = load_checked(cfg);
    OracleOptions oo;
    oo.n = cfg.n;
    oo.seed = cfg.seed;
    oo.workers = cfg.workers;
    const OracleComparison horizon = compare_horizon_laws(spec, cfg.s, oo);
    json report = em.header("compare");
    report["s"] = cfg.s;
    report["n"] = cfg.n;
    report["seed"] = cfg.seed;
    report["horizon_laws"] = to_json(horizon);
    bool pass = horizon.report.pass;
    if (spec.orientation == Orientation::upper && stationary_distribution(spec).m1 > 0.0) {
        const OracleComparison all_time = compare_all_time_infimum(spec, oo);
        report["all_time_infimum"] = to_json(all_time);
        report["all_time_infimum"]["horizon"] = long_horizon(spec);
        pass = pass && all_time.report.pass;
    }
    report["pass"] = pass;
    em.finish(report, "compare");
    if (!pass) err << "compare: simulation disagrees with the analytic laws at the " << oo.level << " level\n";
    return pass ? kExitOk : kExitFailure;
}

struct Check {
    std::string name;
    double value;
    double expected;
    double tol;
    bool pass() const { return std::abs(value - expected) <= tol; }
};

int cmd_selftest(const RunConfig& cfg, Emitter& em, std::ostream& err) {
    const double r2 = std::numbers::sqrt2, r3 = std::sqrt(3.0);
    std::vector<Check> checks;
    {
        const ModelSpec spec = benchmarks::scalar(-1.0, 1.0, 2.0);
        const SupFactorization sup = solve_sup(spec, 1.0);
        checks.push_back({"scalar sup p_plus", sup.p_plus(0, 0), r2 / 2.0, 1e-8});
        checks.push_back({"scalar sup D_sup", sup.D_sup(0, 0), r2, 1e-8});
    }
    {
        const ModelSpec spec = benchmarks::scalar(-1.0, 3.0, 2.0);
        const InfFactorization inf = solve_inf(spec, 1.0);
        checks.push_back({"scalar inf p_check_plus", inf.p_check_plus(0, 0), 1.0 / (1.0 + r3), 1e-8});
        checks.push_back({"scalar inf D_inf", inf.D_inf(0, 0), r3 - 1.0, 1e-8});
        checks.push_back({"scalar inf m_check", inf.m_check(0, 0), 1.0 / r3, 1e-6});
        RuinOptions ro;
        const std::vector<double> xs{-0.5, -1.0, -2.0, -5.0};
        const RuinCurve rc = ruin_curve(spec, xs, ro);
        checks.push_back({"scalar ruin R_check", rc.R_check(0, 0), 1.0, 1e-4});
        for (std::size_t i = 0; i < xs.size(); ++i)
            checks.push_back({"scalar ruin x=" + json(xs[i]).dump(), rc.values[i](0, 0), std::exp(xs[i]), 1e-4});
    }
    {
        const ModelSpec spec = benchmarks::zero_drift_scalar();
        const ZeroDriftAtoms z = zero_drift_atoms(spec, 1.0);
        checks.push_back({"zero drift p_minus", z.p_minus ? (*z.p_minus)(0, 0) : std::nan(""), 1.0, 1e-8});
        checks.push_back({"zero drift P0_tilde", z.P0_tilde ? (*z.P0_tilde)(0, 0) : std::nan(""), 0.25, 1e-10});
    }
    json report = em.header("selftest");
    json rows = json::array();
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass();
        rows.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"tol", c.tol}, {"pass", c.pass()}});
        err << (c.pass() ? "PASS " : "FAIL ") << c.name << ": " << json(c.value).dump() << " (expected "
            << json(c.expected).dump() << ")\n";
    }
    report["checks"] = rows;
    report["pass"] = all;
    em.finish(report, "selftest");
    (void)cfg;
    return all ? kExitOk : kExitFailure;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Emitter em(cfg, out);
    try {
        const std::string& c = cfg.subcommand;
        if (c == "validate") return cmd_validate(cfg, em, err);
        if (c == "transform") return cmd_transform(cfg, em);
        if (c == "factorize") return cmd_factorize(cfg, em);
        if (c == "extrema") return cmd_extrema(cfg, em);
        if (c == "ruin") return cmd_ruin(cfg, em);
        if (c == "simulate") return cmd_simulate(cfg, em);
        if (c == "compare") return cmd_compare(cfg, em, err);
        if (c == "selftest") return cmd_selftest(cfg, em, err);
        err << "unknown subcommand '" << c << "'\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

unsigned default_workers() {
    const char* v = std::getenv("MAWHF_WORKERS");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    const unsigned long w = std::strtoul(v, &end, 10);
    if (*end != '\0' || w > 4096) return 0;
    return static_cast<unsigned>(w);
}

}  // namespace mawhf::cli
