#pragma once

#include "mawhf/projection.hpp"

#include <iosfwd>
#include <vector>

namespace mawhf {

/// Matrix-valued function tabulated on a uniform grid x_j = x_min + j h.
/// As a distribution, values[j] = P{xi < x_j, x(theta_s) = r | x(0) = k}
/// with any mass sitting exactly at 0 held in atom0.
struct GriddedDistribution {
    double s = 0.0;
    double x_min = 0.0;
    double h = 0.0;
    std::vector<Matrix> values;
    Matrix atom0;
    /// Estimated absolute error of the tabulated values.
    double error_estimate = 0.0;

    int m() const { return static_cast<int>(atom0.rows()); }
    std::size_t size() const { return values.size(); }
    double x(std::size_t j) const { return x_min + static_cast<double>(j) * h; }
    double x_max() const { return x(values.size() - 1); }
    /// Index of the node at x = 0, or npos if 0 is not a node.
    std::size_t zero_index() const;
    /// Linear interpolation; constant extrapolation outside the grid.
    Matrix at(double x) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct GridParams {
    /// FFT length; the grid spans [-x_span, x_span] with n intervals.
    std::size_t n = std::size_t{1} << 16;
    /// Half-width of the grid; 0 selects it from the decay rates.
    double x_span = 0.0;
    /// Tabulate only x <= 0 (skips the second transform).
    bool negative_only = false;
};

/// Law of the canonical process xi_can(theta_s) by damped Fourier inversion of
/// L(u) along Re u = u_minus/2 (x < 0) and Re u = u_plus/2 (x > 0). The
/// drift-only part s(D0 - uA)^{-1} is inverted in closed form and subtracted,
/// and in zero-drift mode the atom at 0 is split off analytically.
GriddedDistribution invert_canonical(const CanonicalView& view, const GridParams& params = {});

/// Law of xi(theta_s) in the model's own coordinates.
GriddedDistribution invert_xi_distribution(const ModelSpec& spec, double s, const GridParams& params = {});

/// Reflect a distribution of X into the distribution of -X.
GriddedDistribution reflect(const GriddedDistribution& dist, const Matrix& total);

/// E[exp(u X); X in (-inf, 0)] computed from the tabulated CDF (entrywise
/// Stieltjes integral, piecewise linear between nodes).
CMatrix stieltjes_minus(const GriddedDistribution& dist, Complex u);

/// Full transform E exp(u X) including the atom, for checking a grid
/// against its analytic transform.
CMatrix retransform(const GriddedDistribution& dist, Complex u);

/// int_{(-inf,0)} e^{c x} dP(s,x) with entry (k,r) using rate c_r.
Matrix minus_projection_moment(const GriddedDistribution& dist, const Vector& column_rates);
Matrix minus_projection_moment(const GriddedDistribution& dist, double c);

enum class KernelSide { left, right };

/// Grid of int_0^inf e^{-Cy} P(s, x - y) dy (left) or
/// int_0^inf P(s, x - y) e^{-Cy} dy (right) on the same nodes as dist.
/// The atom is included as part of P for nodes x > 0.
GriddedDistribution exp_smooth_convolution_grid(const GriddedDistribution& dist, const Vector& c, KernelSide side);

/// Same convolution evaluated at a single x inside the grid.
Matrix exp_smooth_convolution(const GriddedDistribution& dist, const Vector& c, double x, KernelSide side);

/// Writes columns x,k,r,value preceded by "# atom0" comment lines.
void write_csv(std::ostream& os, const GriddedDistribution& dist, std::size_t stride = 1);

}  // namespace mawhf
