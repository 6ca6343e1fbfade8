#include "mawhf/asymptotics.hpp"

#include "inversion_detail.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mawhf {

namespace {

void require_proper_infimum(const ModelSpec& spec, const char* what) {
    if (spec.orientation != Orientation::upper)
        throw DomainError(std::string(what) + ": upper models only (mirror the model to study its supremum)");
    if (!(stationary_distribution(spec).m1 > 0.0))
        throw DomainError(std::string(what) + ": infimum not proper / condition m1 > 0 violated");
}

Matrix lambda_matrix(const ModelSpec& spec) { return spec.lambda.asDiagonal(); }

// Lambda - N (f(0) - I).
Matrix no_move_generator(const ModelSpec& spec) {
    const int m = spec.m;
    const Matrix n = spec.nu.asDiagonal();
    return lambda_matrix(spec) - n * (switch_zero_matrix(spec) - Matrix::Identity(m, m));
}

}  // namespace

std::vector<double> default_s_sequence() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}; }

Extrapolated extrapolate_to_zero(const std::vector<double>& s, const std::vector<Matrix>& values) {
    const std::size_t n = s.size();
    if (n == 0 || values.size() != n) throw DomainError("extrapolate_to_zero: need matching, non-empty sequences");
    std::vector<Matrix> p = values;
    Matrix prev_top = p[0];
    // After pass k, p[i] holds the interpolant through points i..i+k evaluated at 0.
    for (std::size_t k = 1; k < n; ++k) {
        prev_top = p[0];
        for (std::size_t i = 0; i + k < n; ++i) {
            const double si = s[i], sj = s[i + k];
            p[i] = (-sj * p[i] + si * p[i + 1]) / (si - sj);
        }
    }
    return {p[0], n > 1 ? max_abs(Matrix(p[0] - prev_top)) : 0.0};
}

RCheckLimit limit_R_check(const ModelSpec& spec, const std::vector<double>& s_values) {
    require_proper_infimum(spec, "limit_R_check");
    FactorizeOptions opt;
    opt.build_grid = false;
    const Matrix lam_exp = exponential_intensity(spec);
    const int m = spec.m;
    std::vector<Matrix> route_p, route_m;
    for (double s : s_values) {
        const InfFactorization f = solve_inf(spec, s, opt);
        route_p.push_back(s * checked_inverse(f.p_check_plus, "p_check") * f.Ps);
        route_m.push_back(s * Matrix::Identity(m, m) + lam_exp * f.m_check);
    }
    const Extrapolated ep = extrapolate_to_zero(s_values, route_p);
    const Extrapolated em = extrapolate_to_zero(s_values, route_m);
    RCheckLimit out;
    out.via_p_check = ep.value;
    out.via_m_check = em.value;
    out.R_check = em.value;
    out.discrepancy = max_abs(Matrix(ep.value - em.value));
    out.extrapolation_error = std::max(ep.error, em.error);
    out.s_values = s_values;
    if (!(out.discrepancy <= 1e-4)) {
        std::ostringstream os;
        os << "limit_R_check: the two limit routes disagree by " << out.discrepancy;
        throw NumericalError(os.str());
    }
    return out;
}

CMatrix inf_transform_full(const ModelSpec& spec, Complex r, const Matrix& R_check) {
    CumulantEvaluator ev(spec);
    const int m = spec.m;
    const CMatrix k = ev.continued_exponent(r);
    const CMatrix cr = Matrix(spec.c.asDiagonal()).cast<Complex>() - r * CMatrix::Identity(m, m);
    return r * checked_inverse(k, "K(r)") * checked_inverse(cr, "C - rI") * R_check.cast<Complex>();
}

ZeroDriftAtoms zero_drift_atoms(const ModelSpec& spec, std::optional<double> s) {
    if (!spec.zero_drift) throw DomainError("zero_drift_atoms: the model is not in zero-drift mode");
    ZeroDriftAtoms out;
    if (s) out.P0_tilde = zero_atom_resolvent(spec, *s);
    if (spec.orientation == Orientation::upper && stationary_distribution(spec).m1 > 0.0) {
        const RCheckLimit lim = limit_R_check(spec);
        out.p_minus = checked_inverse(no_move_generator(spec), "Lambda - N(f(0) - I)") * lim.R_check;
    }
    return out;
}

namespace {

Matrix atom_at_zero(const ModelSpec& spec, const Matrix& R_check) {
    const int m = spec.m;
    if (!spec.zero_drift) return Matrix::Zero(m, m);
    return checked_inverse(no_move_generator(spec), "Lambda - N(f(0) - I)") * R_check;
}

}  // namespace

Matrix inf_transform_limit(const ModelSpec& spec, double r) {
    require_proper_infimum(spec, "inf_transform_limit");
    if (!(r > 0.0)) throw DomainError("inf_transform_limit: r must be positive");
    const RCheckLimit lim = limit_R_check(spec);
    const CMatrix full = inf_transform_full(spec, Complex{r, 0.0}, lim.R_check);
    return full.real() - atom_at_zero(spec, lim.R_check);
}

namespace {

// Negative root of the Perron root of K, or NaN when K stays below zero.
double negative_root(const CumulantEvaluator& ev) {
    const double lo = ev.strip_lo();
    auto kappa = [&](double r) { return dominant_real_eigenvalue(ev.eval_K(r)); };
    double inside = 0.0, outside = std::numeric_limits<double>::quiet_NaN();
    for (double r = -1e-3;; r *= 2.0) {
        if (r <= lo || r < -1e8) {
            if (!std::isfinite(lo) || r < -1e8) return std::numeric_limits<double>::quiet_NaN();
            r = lo + 1e-12 * std::max(1.0, std::abs(lo));
            if (kappa(r) > 0.0) outside = r;
            break;
        }
        if (kappa(r) > 0.0) {
            outside = r;
            break;
        }
        inside = r;
    }
    if (std::isnan(outside)) return outside;
    for (int it = 0; it < 200 && inside - outside > 1e-15 * std::abs(outside); ++it) {
        const double mid = 0.5 * (inside + outside);
        (kappa(mid) > 0.0 ? outside : inside) = mid;
    }
    return 0.5 * (inside + outside);
}

}  // namespace

RuinCurve ruin_curve(const ModelSpec& spec, const std::vector<double>& xs, const RuinOptions& opt) {
    require_proper_infimum(spec, "ruin_curve");
    for (double x : xs)
        if (!(x < 0.0)) throw DomainError("ruin_curve: grid points must be negative");
    const std::size_t n = opt.n;
    if (n < 16 || (n & (n - 1)) != 0) throw DomainError("ruin_curve: grid size must be a power of two >= 16");
    const int m = spec.m;
    CumulantEvaluator ev(spec);
    const DriftStats stats = stationary_distribution(spec);

    RuinCurve out;
    out.x = xs;
    out.limit = limit_R_check(spec);
    out.R_check = out.limit.R_check;
    out.p_minus = atom_at_zero(spec, out.R_check);
    const Matrix f0 = stats.P0 / stats.m1 * checked_inverse(Matrix(spec.c.asDiagonal()), "C") * out.R_check;
    const Matrix a1 = out.p_minus - f0;

    double far = 0.0;
    for (double x : xs) far = std::max(far, -x);
    for (double x : opt.cross_check_x) far = std::max(far, -x);
    const double root = negative_root(ev);
    out.decay_root = root;
    const std::size_t half = n / 2;
    GriddedDistribution& grid = out.grid;
    grid.s = 0.0;
    grid.atom0 = out.p_minus;

    if (std::isnan(root)) {
        // No downward movement at all: xi- = 0.
        const double span = opt.x_span > 0.0 ? opt.x_span : std::max(40.0, 1.05 * far);
        grid.x_min = -span;
        grid.h = 2.0 * span / static_cast<double>(n);
        grid.values.assign(half + 1, Matrix::Zero(m, m));
        grid.error_estimate = max_abs(a1);
    } else {
        const double beta = -root;
        const double span = opt.x_span > 0.0 ? opt.x_span : std::max(40.0 / beta, 1.05 * far);
        const double h = 2.0 * span / static_cast<double>(n);
        const double dy = std::numbers::pi / span;
        const double g = 0.5 * beta;
        Matrix a2 = Matrix::Zero(m, m);
        if (!spec.zero_drift) a2 = checked_inverse(Matrix((-spec.a).asDiagonal()), "|A|") * out.R_check + beta * a1;
        const CMatrix f0c = f0.cast<Complex>(), a1c = a1.cast<Complex>(), a2c = a2.cast<Complex>();

        std::vector<std::vector<Complex>> samples(m * m, std::vector<Complex>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const Complex u{-g, (static_cast<double>(k) - static_cast<double>(half)) * dy};
            const Complex w = u + beta;
            const CMatrix t = (inf_transform_full(spec, u, out.R_check) - f0c) / u - a1c / w - a2c / (w * w);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) samples[a * m + b][k] = t(a, b);
        }
        std::vector<std::vector<Complex>> inv(m * m);
        for (int e = 0; e < m * m; ++e) inv[e] = detail::centered_inverse(samples[e], dy);

        grid.x_min = -span;
        grid.h = h;
        grid.values.assign(half + 1, Matrix::Zero(m, m));
        for (std::size_t j = 0; j <= half; ++j) {
            const double x = grid.x(j);
            const double ex = std::exp(beta * x);
            Matrix val = -a1 * ex + a2 * (x * ex);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) val(a, b) -= std::exp(g * x) * inv[a * m + b][j].real();
            grid.values[j] = val;
        }
        double err = 0.0;
        for (int e = 0; e < m * m; ++e) {
            err = std::max(err, std::abs(inv[e][0]) * std::exp(-g * span));
            err = std::max(err, std::abs(samples[e][0]) * dy * static_cast<double>(half) / (3.0 * std::numbers::pi));
        }
        grid.error_estimate = err;
    }
    out.inversion_error = grid.error_estimate;
    for (double x : xs) out.values.push_back(grid.at(x));

    if (opt.cross_check && !opt.cross_check_x.empty()) {
        std::vector<std::vector<Matrix>> by_x(opt.cross_check_x.size());
        for (double s : opt.cross_check_s) {
            const InfFactorization f = solve_inf(spec, s);
            for (std::size_t i = 0; i < opt.cross_check_x.size(); ++i) by_x[i].push_back(f.inf_cdf(opt.cross_check_x[i]));
        }
        out.cross_check_deviation = 0.0;
        for (std::size_t i = 0; i < by_x.size(); ++i) {
            const Extrapolated e = extrapolate_to_zero(opt.cross_check_s, by_x[i]);
            out.cross_check_extrapolation_error = std::max(out.cross_check_extrapolation_error, e.error);
            out.cross_check_deviation =
                std::max(out.cross_check_deviation, max_abs(Matrix(e.value - grid.at(opt.cross_check_x[i]))));
        }
        if (out.cross_check_deviation > opt.cross_check_tol) {
            std::ostringstream os;
            os << "ruin_curve: small-s extrapolation disagrees with the inversion by " << out.cross_check_deviation;
            throw NumericalError(os.str());
        }
    }
    return out;
}

}  // namespace mawhf
