#include "factorize_core.hpp"

#include <cmath>
#include <sstream>

namespace mawhf {

namespace detail {

std::shared_ptr<Context> make_context(const ModelSpec& spec, double s) {
    return std::make_shared<Context>(spec, orientation_sign(spec.orientation), s);
}

namespace {

enum class Side { right, left };

// x = a + x w (right) or x = a + w x (left).
Matrix affine_step(const Matrix& a, const Matrix& w, const Matrix& x, Side side) {
    return side == Side::right ? Matrix(a + x * w) : Matrix(a + w * x);
}

Matrix affine_direct(const Matrix& a, const Matrix& w, Side side) {
    const Matrix id = Matrix::Identity(a.rows(), a.cols());
    if (side == Side::right) return right_solve(a, Matrix(id - w), "fixed-point equation");
    Eigen::PartialPivLU<Matrix> lu(id - w);
    if (!(lu.rcond() > kMinRcond)) throw NumericalError("fixed-point equation is singular");
    return lu.solve(a);
}

Matrix iterate_affine(const AffineMap& map, Side side, const FixedPointOptions& opt, FixedPointDiagnostics& diag) {
    const int m = static_cast<int>(map.a.rows());
    Matrix x = opt.start == FixedPointStart::identity ? Matrix(Matrix::Identity(m, m)) : Matrix(Matrix::Zero(m, m));
    double prev = std::numeric_limits<double>::infinity();
    diag = {};
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Matrix next = affine_step(map.a, map.w, x, side);
        if (diag.damped) next = 0.5 * (x + next);
        const double res = max_abs(Matrix(next - x));
        x = std::move(next);
        diag.history.push_back(res);
        diag.iterations = it;
        diag.residual = res;
        if (res < opt.tol) {
            diag.converged = true;
            break;
        }
        if (!std::isfinite(res)) break;
        if (res > prev && !diag.damped) diag.damped = true;
        prev = res;
    }
    const Matrix direct = affine_direct(map.a, map.w, side);
    diag.uniqueness_gap = max_abs(Matrix(x - direct));
    if (diag.converged) return x;
    if (!opt.direct_fallback) {
        std::ostringstream os;
        os << "fixed point did not converge in " << opt.max_iterations << " iterations (residual " << diag.residual << ")";
        throw NonConvergenceError(os.str(), diag.history);
    }
    diag.direct_solve = true;
    return direct;
}

void require_positive_spectrum(const Matrix& d, const char* what) {
    Eigen::EigenSolver<Matrix> es(d, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (!(es.eigenvalues()(i).real() > 0.0)) {
            std::ostringstream os;
            os << what << " has an eigenvalue with non-positive real part: " << es.eigenvalues()(i);
            throw NumericalError(os.str());
        }
    }
}

}  // namespace

AffineMap sup_affine_map(const Context& ctx) {
    const auto& view = ctx.view;
    const int m = view.m();
    const double s = view.s();
    const Vector c = view.C().diagonal();
    AffineMap map{Matrix(m, m), Matrix(m, m)};
    Matrix g(m, m);
    for (int r = 0; r < m; ++r) {
        const Complex u{c(r), 0.0};
        const Matrix a = ctx.proj.minus_closed(u).real();
        const Matrix b = ctx.proj.minus(u, HalfLineProjector::Kind::left).value.real();
        map.a.col(r) = a.col(r);
        g.col(r) = (a - view.C() * b).col(r);
    }
    map.w = view.Lambda_exp() * g / s;
    return map;
}

AffineMap inf_affine_map(const Context& ctx) {
    const auto& view = ctx.view;
    const int m = view.m();
    const double s = view.s();
    const Vector c = view.C().diagonal();
    AffineMap map{Matrix(m, m), Matrix(m, m)};
    Matrix g(m, m);
    for (int k = 0; k < m; ++k) {
        const Complex u{c(k), 0.0};
        const Matrix a = ctx.proj.minus_closed(u).real();
        const Matrix b = ctx.proj.minus(u, HalfLineProjector::Kind::right).value.real();
        map.a.row(k) = a.row(k);
        g.row(k) = (a - b * view.C()).row(k);
    }
    map.w = g * view.Lambda_exp() / s;
    return map;
}

namespace {

double grid_error(const GriddedDistribution& base, const Matrix& factor) {
    return base.error_estimate * (1.0 + 2.0 * max_abs(factor) * static_cast<double>(factor.rows()));
}

struct Convolved {
    GriddedDistribution dist;
    double correction = 0.0;
};

// Convolution on the grid with one Richardson step against the doubled step;
// the O(h^2) correction is interpolated linearly onto the odd nodes.
Convolved convolve_extrapolated(const GriddedDistribution& base, const Vector& c, KernelSide side) {
    Convolved out{exp_smooth_convolution_grid(base, c, side), 0.0};
    const std::size_t n = base.size();
    if (n < 5 || base.zero_index() == GriddedDistribution::npos || base.zero_index() % 2 != 0) return out;
    GriddedDistribution coarse = base;
    coarse.h = 2.0 * base.h;
    coarse.values.clear();
    for (std::size_t j = 0; j < n; j += 2) coarse.values.push_back(base.values[j]);
    const GriddedDistribution cc = exp_smooth_convolution_grid(coarse, c, side);
    std::vector<Matrix> delta(cc.size());
    for (std::size_t j = 0; j < cc.size(); ++j) {
        delta[j] = (out.dist.values[2 * j] - cc.values[j]) / 3.0;
        out.correction = std::max(out.correction, max_abs(delta[j]));
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = j / 2;
        if (j % 2 == 0) out.dist.values[j] += delta[k];
        else if (k + 1 < delta.size()) out.dist.values[j] += 0.5 * (delta[k] + delta[k + 1]);
        else out.dist.values[j] += delta[k];
    }
    return out;
}

}  // namespace

std::shared_ptr<SupCore> solve_sup_core(std::shared_ptr<Context> ctx, const FactorizeOptions& opt) {
    auto core = std::make_shared<SupCore>();
    const auto& view = ctx->view;
    const int m = view.m();
    const double s = view.s();
    core->s = s;
    core->Ps = view.Ps();
    core->C = view.C();
    core->Lam = view.Lambda_exp();
    const AffineMap map = sup_affine_map(*ctx);
    core->M = iterate_affine(map, Side::right, opt.fixed_point, core->diag);
    const Matrix id = Matrix::Identity(m, m);
    core->p_plus = s * checked_inverse(Matrix(s * id + core->M * core->Lam), "sI + M Lambda") * core->Ps;
    core->q_plus = core->Ps - core->p_plus;
    const Matrix ps_inv = checked_inverse(core->Ps, "Ps");
    core->D = ps_inv * core->C * core->p_plus;
    require_positive_spectrum(core->D, "sup tail exponent");
    const Matrix factor = core->M * core->Lam / s;
    core->complement_atom = (id + factor) * view.atom0();
    if (opt.build_grid) {
        GridParams gp = opt.grid;
        gp.negative_only = true;
        const GriddedDistribution base = invert_canonical(view, gp);
        const Convolved cv = convolve_extrapolated(base, core->C.diagonal(), KernelSide::left);
        const GriddedDistribution& conv = cv.dist;
        core->grid = base;
        const Matrix lead = id + factor;
        const Matrix smooth = factor * core->C;
        for (std::size_t j = 0; j < base.size(); ++j) core->grid.values[j] = lead * base.values[j] - smooth * conv.values[j];
        core->grid.atom0 = core->complement_atom;
        core->grid.error_estimate = grid_error(base, factor) + max_abs(smooth) * cv.correction;
        core->has_grid = true;
    }
    core->ctx = std::move(ctx);
    return core;
}

std::shared_ptr<InfCore> solve_inf_core(std::shared_ptr<Context> ctx, const FactorizeOptions& opt) {
    auto core = std::make_shared<InfCore>();
    const auto& view = ctx->view;
    const int m = view.m();
    const double s = view.s();
    core->s = s;
    core->Ps = view.Ps();
    core->C = view.C();
    core->Lam = view.Lambda_exp();
    const AffineMap map = inf_affine_map(*ctx);
    core->m_check = iterate_affine(map, Side::left, opt.fixed_point, core->diag);
    const Matrix id = Matrix::Identity(m, m);
    core->p_check = s * core->Ps * checked_inverse(Matrix(s * id + core->Lam * core->m_check), "sI + Lambda m");
    core->q_check = core->Ps - core->p_check;
    const Matrix ps_inv = checked_inverse(core->Ps, "Ps");
    core->D = core->p_check * core->C * ps_inv;
    require_positive_spectrum(core->D, "inf tail exponent");
    const Matrix factor = core->Lam * core->m_check / s;
    core->p_minus = view.atom0() * (id + factor);
    if (opt.build_grid) {
        GridParams gp = opt.grid;
        gp.negative_only = true;
        const GriddedDistribution base = invert_canonical(view, gp);
        const Convolved cv = convolve_extrapolated(base, core->C.diagonal(), KernelSide::right);
        const GriddedDistribution& conv = cv.dist;
        core->grid = base;
        const Matrix lead = id + factor;
        const Matrix smooth = core->C * factor;
        for (std::size_t j = 0; j < base.size(); ++j) core->grid.values[j] = base.values[j] * lead - conv.values[j] * smooth;
        core->grid.atom0 = core->p_minus;
        core->grid.error_estimate = grid_error(base, factor) + max_abs(smooth) * cv.correction;
        core->has_grid = true;
    }
    core->ctx = std::move(ctx);
    return core;
}

CMatrix SupCore::phi_plus(Complex u) const {
    const int m = static_cast<int>(Ps.rows());
    const CMatrix id = CMatrix::Identity(m, m);
    const Matrix ps_inv = checked_inverse(Ps, "Ps");
    const CMatrix left = C.cast<Complex>() - u * id;
    const CMatrix mid = (p_plus * ps_inv * C).cast<Complex>() - u * id;
    return left * checked_inverse(mid, "p+ Ps^{-1} C - u") * p_plus.cast<Complex>();
}

CMatrix SupCore::phi_minus(Complex u) const {
    const CMatrix a = ctx->proj.minus_closed(u);
    const CMatrix b = ctx->proj.minus(u, HalfLineProjector::Kind::left).value;
    const CMatrix factor = (M * Lam / s).cast<Complex>();
    return a + factor * (a - C.cast<Complex>() * b);
}

Matrix SupCore::tail(double x) const { return q_plus * expm(Matrix(-x * D)); }

CMatrix InfCore::phi_minus(Complex u) const {
    const CMatrix a = ctx->proj.minus_closed(u);
    const CMatrix b = ctx->proj.minus(u, HalfLineProjector::Kind::right).value;
    const CMatrix factor = (Lam * m_check / s).cast<Complex>();
    return a + (a - b * C.cast<Complex>()) * factor;
}

CMatrix InfCore::phi_plus(Complex u) const {
    const int m = static_cast<int>(Ps.rows());
    const CMatrix id = CMatrix::Identity(m, m);
    const Matrix ps_inv = checked_inverse(Ps, "Ps");
    const CMatrix mid = (C * ps_inv * p_check).cast<Complex>() - u * id;
    return p_check.cast<Complex>() * checked_inverse(mid, "C Ps^{-1} p - u") * (C.cast<Complex>() - u * id);
}

Matrix InfCore::check_tail(double x) const { return expm(Matrix(-x * D)) * q_check; }

}  // namespace detail

namespace {

const GriddedDistribution& require_grid(bool has_grid, const GriddedDistribution& grid, const char* what) {
    if (!has_grid) throw DomainError(std::string(what) + ": the law was not tabulated (grid disabled)");
    return grid;
}

void require_nonpositive(double x, const char* what) {
    if (x > 0.0) throw DomainError(std::string(what) + ": argument must be <= 0");
}

void require_nonnegative(double x, const char* what) {
    if (x < 0.0) throw DomainError(std::string(what) + ": argument must be >= 0");
}

}  // namespace

SupFactorization solve_sup(const ModelSpec& spec, double s, const FactorizeOptions& opt) {
    auto ctx = detail::make_context(spec, s);
    SupFactorization f;
    f.s = s;
    f.orientation = spec.orientation;
    f.Ps = ctx->view.Ps();
    if (spec.orientation == Orientation::upper) {
        auto core = detail::solve_sup_core(std::move(ctx), opt);
        f.p_plus = core->p_plus;
        f.q_plus = core->q_plus;
        f.M = core->M;
        f.D_sup = core->D;
        f.complement_atom = core->complement_atom;
        f.grid = core->grid;
        f.has_grid = core->has_grid;
        f.diagnostics = core->diag;
        f.sup_core = std::move(core);
    } else {
        auto core = detail::solve_inf_core(std::move(ctx), opt);
        f.p_plus = core->p_minus;
        f.q_plus = f.Ps - f.p_plus;
        f.M = core->m_check;
        f.D_sup = core->D;
        f.complement_atom = core->p_check;
        if (core->has_grid) {
            f.grid = reflect(core->grid, f.Ps);
            f.has_grid = true;
        }
        f.diagnostics = core->diag;
        f.inf_core = std::move(core);
    }
    return f;
}

InfFactorization solve_inf(const ModelSpec& spec, double s, const FactorizeOptions& opt) {
    auto ctx = detail::make_context(spec, s);
    InfFactorization f;
    f.s = s;
    f.orientation = spec.orientation;
    f.Ps = ctx->view.Ps();
    if (spec.orientation == Orientation::upper) {
        auto core = detail::solve_inf_core(std::move(ctx), opt);
        f.p_check_plus = core->p_check;
        f.q_check_plus = core->q_check;
        f.m_check = core->m_check;
        f.D_inf = core->D;
        f.p_minus = core->p_minus;
        f.grid = core->grid;
        f.has_grid = core->has_grid;
        f.diagnostics = core->diag;
        f.inf_core = std::move(core);
    } else {
        auto core = detail::solve_sup_core(std::move(ctx), opt);
        f.p_check_plus = core->complement_atom;
        f.q_check_plus = f.Ps - f.p_check_plus;
        f.m_check = core->M;
        f.D_inf = core->D;
        f.p_minus = core->p_plus;
        if (core->has_grid) {
            f.grid = reflect(core->grid, f.Ps);
            f.has_grid = true;
        }
        f.diagnostics = core->diag;
        f.sup_core = std::move(core);
    }
    return f;
}

Matrix SupFactorization::sup_tail(double x) const {
    require_nonnegative(x, "sup_tail");
    if (sup_core) return sup_core->tail(x);
    return require_grid(inf_core->has_grid, inf_core->grid, "sup_tail").at(-x);
}

Matrix SupFactorization::complement_cdf(double x) const {
    require_nonpositive(x, "complement_cdf");
    if (sup_core) return require_grid(has_grid, grid, "complement_cdf").at(x);
    return inf_core->check_tail(-x);
}

CMatrix SupFactorization::phi_plus(Complex alpha) const {
    const Complex i{0.0, 1.0};
    if (sup_core) return sup_core->phi_plus(i * alpha);
    return inf_core->phi_minus(-i * alpha);
}

CMatrix SupFactorization::phi_minus(Complex alpha) const {
    const Complex i{0.0, 1.0};
    if (sup_core) return sup_core->phi_minus(i * alpha);
    return inf_core->phi_plus(-i * alpha);
}

Matrix InfFactorization::check_tail(double x) const {
    require_nonnegative(x, "check_tail");
    if (inf_core) return inf_core->check_tail(x);
    return require_grid(sup_core->has_grid, sup_core->grid, "check_tail").at(-x);
}

Matrix InfFactorization::inf_cdf(double x) const {
    require_nonpositive(x, "inf_cdf");
    if (inf_core) return require_grid(has_grid, grid, "inf_cdf").at(x);
    return sup_core->tail(-x);
}

CMatrix InfFactorization::phi_minus(Complex alpha) const {
    const Complex i{0.0, 1.0};
    if (inf_core) return inf_core->phi_minus(i * alpha);
    return sup_core->phi_plus(-i * alpha);
}

CMatrix InfFactorization::phi_plus(Complex alpha) const {
    const Complex i{0.0, 1.0};
    if (inf_core) return inf_core->phi_plus(i * alpha);
    return sup_core->phi_minus(-i * alpha);
}

Matrix first_passage_up(const SupFactorization& f, double x) {
    if (!(x > 0.0)) throw DomainError("first_passage_up: level must be > 0");
    return right_solve(f.sup_tail(x), f.Ps, "Ps");
}

Matrix first_passage_down(const InfFactorization& f, double x) {
    if (!(x < 0.0)) throw DomainError("first_passage_down: level must be < 0");
    return right_solve(f.inf_cdf(x), f.Ps, "Ps");
}

std::vector<double> alpha_probes(int n, double width) {
    std::vector<double> out;
    if (n <= 0) return out;
    if (n == 1) return {0.0};
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(-width + 2.0 * width * i / (n - 1));
    return out;
}

IdentityResiduals identity_residuals(const ModelSpec& spec, const SupFactorization& sup, const InfFactorization& inf,
                                     const std::vector<double>& alphas) {
    CumulantEvaluator ev(spec);
    const double s = sup.s;
    const CMatrix ps_inv = checked_inverse(sup.Ps, "Ps").cast<Complex>();
    IdentityResiduals r;
    for (double a : alphas) {
        const Complex alpha{a, 0.0};
        const CMatrix phi = ev.eval_phi(s, a);
        r.sup_form = std::max(r.sup_form, max_abs(CMatrix(phi - sup.phi_plus(alpha) * ps_inv * sup.phi_minus(alpha))));
        r.inf_form = std::max(r.inf_form, max_abs(CMatrix(phi - inf.phi_minus(alpha) * ps_inv * inf.phi_plus(alpha))));
    }
    const CMatrix ps = sup.Ps.cast<Complex>();
    const Complex zero{0.0, 0.0};
    for (const CMatrix& v : {sup.phi_plus(zero), sup.phi_minus(zero), inf.phi_minus(zero), inf.phi_plus(zero)})
        r.boundary = std::max(r.boundary, max_abs(CMatrix(v - ps)));
    return r;
}

namespace {

// int_a^b f(x) e^{i w x} dx for f linear between f0 and f1.
CMatrix filon_cell(const Matrix& f0, const Matrix& f1, double a, double h, double w) {
    if (std::abs(w * h) < 1e-3) {
        const Complex e0 = std::exp(Complex{0.0, w * a}), e1 = std::exp(Complex{0.0, w * (a + h)});
        return 0.5 * h * (e0 * f0.cast<Complex>() + e1 * f1.cast<Complex>());
    }
    const Complex iw{0.0, w};
    const Complex e0 = std::exp(iw * a), e1 = std::exp(iw * (a + h));
    const Complex i0 = (e1 - e0) / iw;
    const Complex i1 = h * e1 / iw - (e1 - e0) / (iw * iw);
    return i0 * f0.cast<Complex>() + (i1 / h) * (f1 - f0).cast<Complex>();
}

}  // namespace

PhiPlusCrossCheck phi_plus_general(const SupFactorization& f, const std::vector<double>& alphas) {
    if (!f.sup_core) throw DomainError("phi_plus_general: upper models only");
    const auto& core = *f.sup_core;
    const GriddedDistribution& grid = require_grid(core.has_grid, core.grid, "phi_plus_general");
    const std::size_t zero = grid.zero_index();
    if (zero == GriddedDistribution::npos) throw DomainError("phi_plus_general: grid must contain x = 0");
    const int m = static_cast<int>(core.Ps.rows());
    const Vector c = core.C.diagonal();
    const Vector lam = core.Lam.diagonal();

    // K(s,x) = K0 exp(-C x) for x > 0, K0 = int e^{y C} dP^-(y) Lambda~ (atom included).
    Matrix k0 = grid.atom0;
    for (int r = 0; r < m; ++r) {
        const double cr = c(r);
        for (std::size_t j = 1; j <= zero; ++j) {
            const double y0 = grid.x(j - 1), y1 = grid.x(j);
            const double weight = (std::exp(cr * y1) - std::exp(cr * y0)) / (grid.h * cr);
            k0.col(r) += weight * (grid.values[j] - grid.values[j - 1]).col(r);
        }
    }
    k0 = k0 * lam.asDiagonal();

    const double x_end = 40.0 / c.minCoeff();
    const std::size_t cells = 20000;
    const double h = x_end / static_cast<double>(cells);
    std::vector<Matrix> kx(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
        const double x = h * static_cast<double>(j);
        kx[j] = k0 * Vector((-x * c).array().exp()).asDiagonal();
    }

    PhiPlusCrossCheck out;
    out.alphas = alphas;
    const CMatrix ps = core.Ps.cast<Complex>();
    const CMatrix id = CMatrix::Identity(m, m);
    for (double a : alphas) {
        CMatrix k = CMatrix::Zero(m, m);
        for (std::size_t j = 0; j < cells; ++j) k += filon_cell(kx[j], kx[j + 1], h * static_cast<double>(j), h, a);
        const Complex ia{0.0, a};
        CMatrix via = checked_inverse(CMatrix(id - ia * k / core.s), "I - i alpha k / s") * ps;
        CMatrix closed = f.phi_plus(Complex{a, 0.0});
        out.max_deviation = std::max(out.max_deviation, max_abs(CMatrix(via - closed)));
        out.via_convolution.push_back(std::move(via));
        out.via_closed_form.push_back(std::move(closed));
    }
    return out;
}

}  // namespace mawhf
