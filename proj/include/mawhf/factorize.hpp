#pragma once

#include "mawhf/inversion.hpp"

#include <memory>
#include <vector>

namespace mawhf {

/// Raised when a fixed-point iteration exhausts its budget and no fallback
/// is allowed.
class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, std::vector<double> history)
        : NumericalError(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

enum class FixedPointStart { identity, zero };

struct FixedPointOptions {
    double tol = 1e-12;
    int max_iterations = 500;
    FixedPointStart start = FixedPointStart::identity;
    /// If the iteration stalls, take the solution of the (affine) fixed-point
    /// equation by a direct linear solve instead of failing.
    bool direct_fallback = true;
    /// Maximum allowed gap between the iterate and the direct solution.
    double uniqueness_tol = 1e-10;
};

struct FixedPointDiagnostics {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool damped = false;
    bool direct_solve = false;
    /// max |iterate - direct solution| at the end.
    double uniqueness_gap = 0.0;
    std::vector<double> history;
};

struct FactorizeOptions {
    FixedPointOptions fixed_point;
    /// Tabulate the law of the non-exponential side on a grid.
    bool build_grid = true;
    GridParams grid{std::size_t{1} << 16, 0.0, true};
};

namespace detail {
struct Context;
struct SupCore;
struct InfCore;
}  // namespace detail

/// Law of the supremum xi+(theta_s) and of xi(theta_s) - xi+(theta_s).
///
/// Upper models: p_plus = P{xi+ = 0}, P{xi+ > x} = q_plus exp(-D x) with
/// D = Ps^{-1} C p_plus, M = E[exp(xi_bar C)] (column rates), and grid holds
/// P{xi_bar < x}, x <= 0.
/// Lower models are solved through the infimum of the reflected process:
/// then xi_bar carries the matrix-exponential law P{xi_bar < -x} =
/// exp(-D x) q_check, M is E[exp(-C xi+)] (row rates), and grid holds
/// P{xi+ < x}, x >= 0.
struct SupFactorization {
    double s = 0.0;
    Orientation orientation = Orientation::upper;
    Matrix Ps;
    Matrix p_plus, q_plus;
    Matrix M;
    Matrix D_sup;
    /// P{xi_bar = 0}; zero unless the model is in zero-drift mode or lower.
    Matrix complement_atom;
    GriddedDistribution grid;
    bool has_grid = false;
    FixedPointDiagnostics diagnostics;

    /// P{xi+ > x}, x >= 0.
    Matrix sup_tail(double x) const;
    /// P{xi_bar < x}, x <= 0.
    Matrix complement_cdf(double x) const;
    /// E exp(i alpha xi+) and E exp(i alpha xi_bar).
    CMatrix phi_plus(Complex alpha) const;
    CMatrix phi_minus(Complex alpha) const;

    std::shared_ptr<const detail::SupCore> sup_core;
    std::shared_ptr<const detail::InfCore> inf_core;
};

/// Law of the infimum xi-(theta_s) and of xi_check = xi(theta_s) - xi-(theta_s).
///
/// Upper models: p_check_plus = P{xi_check = 0}, P{xi_check > x} =
/// exp(-D x) q_check_plus with D = p_check C Ps^{-1}, m_check =
/// E[exp(C xi-)] (row rates), and grid holds P{xi- < x}, x <= 0.
/// Lower models mirror the roles as for SupFactorization.
struct InfFactorization {
    double s = 0.0;
    Orientation orientation = Orientation::upper;
    Matrix Ps;
    Matrix p_check_plus, q_check_plus;
    Matrix m_check;
    Matrix D_inf;
    /// P{xi- = 0}.
    Matrix p_minus;
    GriddedDistribution grid;
    bool has_grid = false;
    FixedPointDiagnostics diagnostics;

    /// P{xi_check > x}, x >= 0.
    Matrix check_tail(double x) const;
    /// P{xi- < x}, x <= 0.
    Matrix inf_cdf(double x) const;
    /// E exp(i alpha xi-) and E exp(i alpha xi_check).
    CMatrix phi_minus(Complex alpha) const;
    CMatrix phi_plus(Complex alpha) const;

    std::shared_ptr<const detail::SupCore> sup_core;
    std::shared_ptr<const detail::InfCore> inf_core;
};

SupFactorization solve_sup(const ModelSpec& spec, double s, const FactorizeOptions& opt = {});
InfFactorization solve_inf(const ModelSpec& spec, double s, const FactorizeOptions& opt = {});

/// T+(s,x) = E[exp(-s tau+(x)); x(tau+(x))] Ps-relation: T+(s,x) Ps = P{xi+ > x}, x > 0.
Matrix first_passage_up(const SupFactorization& f, double x);
/// T-(s,x) = I - P{xi- > x} Ps^{-1}, x < 0.
Matrix first_passage_down(const InfFactorization& f, double x);

struct IdentityResiduals {
    /// max over probes of |Phi - Phi_+ Ps^{-1} Phi^-|.
    double sup_form = 0.0;
    /// max over probes of |Phi - Phi_- Ps^{-1} Phi^+|.
    double inf_form = 0.0;
    /// max deviation of the four factors from Ps at alpha = 0.
    double boundary = 0.0;
};

/// Checks both factorization forms at the given real alpha probes.
IdentityResiduals identity_residuals(const ModelSpec& spec, const SupFactorization& sup, const InfFactorization& inf,
                                     const std::vector<double>& alphas);

/// n equally spaced real probes on [-width, width].
std::vector<double> alpha_probes(int n = 32, double width = 5.0);

struct PhiPlusCrossCheck {
    std::vector<double> alphas;
    std::vector<CMatrix> via_convolution;
    std::vector<CMatrix> via_closed_form;
    double max_deviation = 0.0;
};

/// Phi_+ rebuilt from the tabulated law of xi_bar: K(s,x) = int dP^-(s,y)
/// Kbar_0(x - y) is formed on a grid, transformed to k(s,alpha), and
/// Phi_+ = (I - i alpha k(s,alpha)/s)^{-1} Ps is compared with the closed form.
/// Upper models only; requires the grid.
PhiPlusCrossCheck phi_plus_general(const SupFactorization& f, const std::vector<double>& alphas);

}  // namespace mawhf
