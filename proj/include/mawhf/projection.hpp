#pragma once

#include "mawhf/spectral.hpp"

#include <vector>

namespace mawhf {

/// The model seen through xi_can = sigma * xi, chosen so that xi_can is
/// upper semi-continuous: drift <= 0, exponential jumps up. For an upper
/// model sigma = +1; a lower (mirrored) model is viewed with sigma = -1.
///
/// All transforms here are in the canonical Laplace variable:
///   L(u) = E[exp(u xi_can(theta_s)); x(theta_s)] = s (sI - K(sigma u))^{-1}.
class CanonicalView {
public:
    CanonicalView(const CumulantEvaluator& ev, int sigma, double s);

    const CumulantEvaluator& evaluator() const { return *ev_; }
    int sigma() const { return sigma_; }
    double s() const { return s_; }
    int m() const { return ev_->m(); }

    CMatrix L(Complex u) const { return ev_->laplace_resolvent(s_, static_cast<double>(sigma_) * u); }
    Matrix K(double u) const { return ev_->eval_K(sigma_ * u); }

    const Matrix& Ps() const { return ps_; }
    /// Diagonal rates of the exponential jumps.
    const Matrix& C() const { return c_; }
    /// Diagonal Lambda * Fbar_0(0).
    const Matrix& Lambda_exp() const { return lam_; }
    /// Atom of xi(theta_s) at zero; nonzero only in zero-drift mode.
    const Matrix& atom0() const { return atom0_; }

    /// Interval (u_minus, u_plus) of real u on which L(u) is finite.
    double u_minus() const { return u_minus_; }
    double u_plus() const { return u_plus_; }

private:
    double crossing(int direction) const;

    const CumulantEvaluator* ev_;
    int sigma_;
    double s_;
    Matrix ps_, c_, lam_, atom0_;
    double dom_lo_, dom_hi_;
    double u_minus_, u_plus_;
};

/// P~0(s) = s (sI + Lambda - N(f(0) - I))^{-1}: probability that xi has not
/// moved by theta_s, split by terminal state.
Matrix zero_atom_resolvent(const ModelSpec& spec, double s);

/// Negative half-line projections [T]_-(u0) of the canonical transforms
///   plain: L(u),  left: (C - uI)^{-1} L(u),  right: L(u) (C - uI)^{-1},
/// i.e. the transform of the part of the underlying measure carried by
/// (-inf, 0), evaluated at any u0 with Re u0 > delta.
///
/// Evaluated as a Cauchy integral along the vertical line Re u = delta inside
/// the analyticity strip, with y = Y sinh(t) and nested trapezoidal levels.
/// Node values of L are cached, so an instance is not thread-safe.
class HalfLineProjector {
public:
    enum class Kind { plain, left, right };

    struct Result {
        CMatrix value;
        double error_estimate = 0.0;
        int levels = 0;
    };

    explicit HalfLineProjector(const CanonicalView& view, double tol = 1e-15, int max_level = 12);

    /// [T]_-(u0); the atom at zero is excluded.
    Result minus(Complex u0, Kind kind) const;
    /// [L]_-^0(u0): plain projection plus the atom at zero.
    CMatrix minus_closed(Complex u0) const;

    double contour() const { return delta_; }
    std::size_t cached_nodes() const;

private:
    const std::vector<CMatrix>& level_values(int level) const;
    double node_t(int level, std::size_t i) const;
    std::size_t level_size(int level) const;

    const CanonicalView* view_;
    double tol_;
    int max_level_;
    double delta_;
    double scale_;
    double t_max_;
    double h0_;
    mutable std::vector<std::vector<CMatrix>> cache_;
};

}  // namespace mawhf
