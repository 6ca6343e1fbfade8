#pragma once

// Canonical (upper semi-continuous) fixed-point solvers shared by the
// factorization and asymptotics modules.

#include "mawhf/factorize.hpp"

namespace mawhf::detail {

struct Context {
    Context(const ModelSpec& spec, int sigma, double s) : ev(spec), view(ev, sigma, s), proj(view) {}
    Context(const Context&) = delete;
    Context& operator=(const Context&) = delete;

    CumulantEvaluator ev;
    CanonicalView view;
    HalfLineProjector proj;
};

std::shared_ptr<Context> make_context(const ModelSpec& spec, double s);

/// Sup side of the canonical process.
struct SupCore {
    std::shared_ptr<Context> ctx;
    double s = 0.0;
    Matrix Ps, C, Lam;
    Matrix M, p_plus, q_plus, D, complement_atom;
    FixedPointDiagnostics diag;
    GriddedDistribution grid;  // P{xi_bar < x}, x <= 0
    bool has_grid = false;

    /// E exp(u sup) and E exp(u xi_bar), canonical Laplace argument.
    CMatrix phi_plus(Complex u) const;
    CMatrix phi_minus(Complex u) const;
    Matrix tail(double x) const;  // P{sup > x}
};

/// Inf side of the canonical process.
struct InfCore {
    std::shared_ptr<Context> ctx;
    double s = 0.0;
    Matrix Ps, C, Lam;
    Matrix m_check, p_check, q_check, D, p_minus;
    FixedPointDiagnostics diag;
    GriddedDistribution grid;  // P{inf < x}, x <= 0
    bool has_grid = false;

    /// E exp(u inf) and E exp(u xi_check), canonical Laplace argument.
    CMatrix phi_minus(Complex u) const;
    CMatrix phi_plus(Complex u) const;
    Matrix check_tail(double x) const;  // P{xi_check > x}
};

std::shared_ptr<SupCore> solve_sup_core(std::shared_ptr<Context> ctx, const FactorizeOptions& opt);
std::shared_ptr<InfCore> solve_inf_core(std::shared_ptr<Context> ctx, const FactorizeOptions& opt);

/// Coefficients of the affine fixed-point maps
/// M = a + M w (sup side) and m_check = a + w m_check (inf side).
struct AffineMap {
    Matrix a, w;
};
AffineMap inf_affine_map(const Context& ctx);
AffineMap sup_affine_map(const Context& ctx);

}  // namespace mawhf::detail
