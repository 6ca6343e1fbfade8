#include "mawhf/projection.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mawhf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Matrix zero_atom_resolvent(const ModelSpec& spec, double s) {
    if (!(s > 0.0)) throw DomainError("zero_atom_resolvent: s must be positive");
    const int m = spec.m;
    const Matrix id = Matrix::Identity(m, m);
    const Matrix n = spec.nu.asDiagonal();
    const Matrix lam = spec.lambda.asDiagonal();
    const Matrix f0 = switch_zero_matrix(spec);
    return s * checked_inverse(Matrix(s * id + lam - n * (f0 - id)), "sI + Lambda - N(f(0) - I)");
}

CanonicalView::CanonicalView(const CumulantEvaluator& ev, int sigma, double s) : ev_(&ev), sigma_(sigma), s_(s) {
    if (sigma != 1 && sigma != -1) throw DomainError("CanonicalView: sigma must be +1 or -1");
    if (!(s > 0.0)) throw DomainError("CanonicalView: s must be positive");
    const auto& spec = ev.spec();
    if (sigma * orientation_sign(spec.orientation) != 1)
        throw DomainError("CanonicalView: sigma must map the model to upper orientation");
    ps_ = resolvent_Ps(spec, s);
    c_ = spec.c.asDiagonal();
    lam_ = exponential_intensity(spec);
    atom0_ = spec.zero_drift ? zero_atom_resolvent(spec, s) : Matrix::Zero(spec.m, spec.m);
    if (sigma > 0) {
        dom_lo_ = ev.strip_lo();
        dom_hi_ = ev.strip_hi();
    } else {
        dom_lo_ = -ev.strip_hi();
        dom_hi_ = -ev.strip_lo();
    }
    u_minus_ = crossing(-1);
    u_plus_ = crossing(+1);
}

// First point along the ray from 0 where the Perron root of K reaches s. The
// Perron root is convex in u and vanishes at 0, so the crossing is unique.
double CanonicalView::crossing(int direction) const {
    const double bound = direction > 0 ? dom_hi_ : dom_lo_;
    auto excess = [&](double u) { return dominant_real_eigenvalue(K(u)) - s_; };
    double inside = 0.0;
    double outside = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(bound)) {
        for (int j = 1; j <= 200; ++j) {
            const double u = bound * (1.0 - std::pow(0.5, 0.25 * j));
            if (excess(u) >= 0.0) {
                outside = u;
                break;
            }
            inside = u;
        }
        if (std::isnan(outside)) return bound;
    } else {
        for (int j = -20; j <= 60; ++j) {
            const double u = direction * std::ldexp(1.0, j);
            if (excess(u) >= 0.0) {
                outside = u;
                break;
            }
            inside = u;
        }
        if (std::isnan(outside)) return direction * kInf;
    }
    for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-15 * std::max(1.0, std::abs(outside)); ++it) {
        const double mid = 0.5 * (inside + outside);
        if (excess(mid) >= 0.0) {
            outside = mid;
        } else {
            inside = mid;
        }
    }
    return outside;
}

HalfLineProjector::HalfLineProjector(const CanonicalView& view, double tol, int max_level)
    : view_(&view), tol_(tol), max_level_(max_level) {
    const double um = view.u_minus();
    delta_ = std::isfinite(um) ? 0.5 * um : -1.0;
    scale_ = std::abs(delta_);
    t_max_ = 36.0;
    h0_ = 0.5;
}

std::size_t HalfLineProjector::level_size(int level) const {
    const auto n0 = static_cast<std::size_t>(std::llround(2.0 * t_max_ / h0_));
    return level == 0 ? n0 + 1 : n0 << (level - 1);
}

double HalfLineProjector::node_t(int level, std::size_t i) const {
    if (level == 0) return -t_max_ + static_cast<double>(i) * h0_;
    const double h = std::ldexp(h0_, -level);
    return -t_max_ + static_cast<double>(2 * i + 1) * h;
}

const std::vector<CMatrix>& HalfLineProjector::level_values(int level) const {
    while (static_cast<int>(cache_.size()) <= level) {
        const int l = static_cast<int>(cache_.size());
        const std::size_t n = level_size(l);
        std::vector<CMatrix> vals;
        vals.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = scale_ * std::sinh(node_t(l, i));
            vals.push_back(view_->L(Complex{delta_, y}));
        }
        cache_.push_back(std::move(vals));
    }
    return cache_[level];
}

std::size_t HalfLineProjector::cached_nodes() const {
    std::size_t n = 0;
    for (const auto& v : cache_) n += v.size();
    return n;
}

HalfLineProjector::Result HalfLineProjector::minus(Complex u0, Kind kind) const {
    if (!(u0.real() > delta_)) throw DomainError("HalfLineProjector: evaluation point must lie right of the contour");
    const int m = view_->m();
    const Matrix& atom = view_->atom0();
    const bool has_atom = kind == Kind::plain && max_abs(atom) > 0.0;
    const Vector c = view_->C().diagonal();

    CMatrix level_sum_total = CMatrix::Zero(m, m);
    CMatrix previous = CMatrix::Zero(m, m);
    Result res;
    CMatrix integrand(m, m);
    for (int level = 0; level <= max_level_; ++level) {
        const auto& vals = level_values(level);
        CMatrix partial = CMatrix::Zero(m, m);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double t = node_t(level, i);
            const double y = scale_ * std::sinh(t);
            const double jac = scale_ * std::cosh(t);
            const Complex u{delta_, y};
            integrand = vals[i];
            if (has_atom) integrand -= atom.cast<Complex>();
            if (kind == Kind::left) {
                for (int k = 0; k < m; ++k) integrand.row(k) /= (c(k) - u);
            } else if (kind == Kind::right) {
                for (int r = 0; r < m; ++r) integrand.col(r) /= (c(r) - u);
            }
            partial += integrand * (jac / (u - u0));
        }
        level_sum_total += partial;
        const double h = std::ldexp(h0_, -level);
        const CMatrix current = level_sum_total * (-h / (2.0 * std::numbers::pi));
        res.value = current;
        res.levels = level;
        if (level >= 3) {
            res.error_estimate = max_abs(CMatrix(current - previous));
            if (res.error_estimate <= std::max(tol_, 1e-13 * max_abs(current))) return res;
        }
        previous = current;
    }
    return res;
}

CMatrix HalfLineProjector::minus_closed(Complex u0) const {
    return minus(u0, Kind::plain).value + view_->atom0().cast<Complex>();
}

}  // namespace mawhf
