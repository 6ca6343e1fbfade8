#pragma once

#include "mawhf/factorize.hpp"

#include <optional>
#include <vector>

namespace mawhf {

/// Small-s sequence used for the s -> 0 limits.
std::vector<double> default_s_sequence();

/// Polynomial extrapolation to s = 0 (Neville). error is the change made by
/// the last point added.
struct Extrapolated {
    Matrix value;
    double error = 0.0;
};
Extrapolated extrapolate_to_zero(const std::vector<double>& s, const std::vector<Matrix>& values);

struct RCheckLimit {
    /// lim s p_check^{-1}(s) Ps.
    Matrix R_check;
    Matrix via_p_check;
    Matrix via_m_check;
    double discrepancy = 0.0;
    double extrapolation_error = 0.0;
    std::vector<double> s_values;
};

/// Requires m1 > 0 and an upper model.
RCheckLimit limit_R_check(const ModelSpec& spec, const std::vector<double>& s_values = default_s_sequence());

/// E exp(r xi-) = r K^{-1}(r) (C - rI)^{-1} R_check, all-time infimum.
CMatrix inf_transform_full(const ModelSpec& spec, Complex r, const Matrix& R_check);
/// E[exp(r xi-); xi- < 0]: the full transform minus its r -> infinity limit p_minus.
Matrix inf_transform_limit(const ModelSpec& spec, double r);

struct ZeroDriftAtoms {
    /// P~0(s); present when s was given.
    std::optional<Matrix> P0_tilde;
    /// P{xi- = 0}; present when m1 > 0.
    std::optional<Matrix> p_minus;
};

ZeroDriftAtoms zero_drift_atoms(const ModelSpec& spec, std::optional<double> s = std::nullopt);

struct RuinOptions {
    std::size_t n = std::size_t{1} << 16;
    /// Half-width of the inversion window (0: chosen from the decay rate).
    double x_span = 0.0;
    /// Compare against small-s solutions of the infimum law at these points.
    bool cross_check = true;
    std::vector<double> cross_check_x{-0.5, -1.0, -2.0};
    std::vector<double> cross_check_s{1e-2, 5e-3, 2.5e-3};
    double cross_check_tol = 1e-3;
};

struct RuinCurve {
    std::vector<double> x;
    /// P{xi- < x}, matrix-valued, at each requested x < 0.
    std::vector<Matrix> values;
    Matrix R_check;
    Matrix p_minus;
    RCheckLimit limit;
    /// Negative root of det K; decay rate of the curve is -decay_root.
    double decay_root = 0.0;
    /// Tabulated P{xi- < x} on x <= 0 (atom at 0 is p_minus).
    GriddedDistribution grid;
    double inversion_error = 0.0;
    /// Max deviation at the cross-check points (negative when skipped).
    double cross_check_deviation = -1.0;
    double cross_check_extrapolation_error = 0.0;
};

/// Law of the all-time infimum for an upper model with m1 > 0.
RuinCurve ruin_curve(const ModelSpec& spec, const std::vector<double>& xs, const RuinOptions& opt = {});

}  // namespace mawhf
