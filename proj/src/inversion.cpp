#include "mawhf/inversion.hpp"

#include "inversion_detail.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <ostream>

namespace mawhf {

namespace {

// Composite Simpson on equally spaced samples; a 3/8 panel absorbs an odd
// interval count.
template <class T>
T simpson(const std::vector<T>& f, double h) {
    const std::size_t n = f.size() - 1;
    if (n == 0) return f[0] * 0.0;
    if (n == 1) return (f[0] + f[1]) * (0.5 * h);
    std::size_t start = 0;
    T acc = f[0] * 0.0;
    if (n % 2 == 1) {
        acc = (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]) * (3.0 * h / 8.0);
        start = 3;
        if (start == n) return acc;
    }
    T inner = f[start] + f[n];
    for (std::size_t j = start + 1; j < n; ++j) inner += f[j] * ((j - start) % 2 == 1 ? 4.0 : 2.0);
    return acc + inner * (h / 3.0);
}

// Weights of int_0^h e^{-cy} P(x_j - y) dy for P linear between the nodes:
// w0 multiplies P(x_j), w1 multiplies P(x_{j-1}).
struct CellWeights {
    double decay, w0, w1;
};

CellWeights cell_weights(double c, double h) {
    const double z = c * h;
    double e1;  // (1 - e^{-z}(1+z)) / z^2
    if (z < 1e-2) {
        e1 = 0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0 + z * z * z * z / 144.0;
    } else {
        e1 = (1.0 - std::exp(-z) * (1.0 + z)) / (z * z);
    }
    const double full = z < 1e-8 ? h * (1.0 - 0.5 * z) : -std::expm1(-z) / c;
    const double w1 = h * e1;
    return {std::exp(-z), full - w1, w1};
}

}  // namespace

std::size_t GriddedDistribution::zero_index() const {
    if (values.empty() || h <= 0.0) return npos;
    const double j = -x_min / h;
    const double r = std::round(j);
    if (r < 0.0 || r >= static_cast<double>(values.size()) || std::abs(j - r) > 1e-9) return npos;
    return static_cast<std::size_t>(r);
}

Matrix GriddedDistribution::at(double xq) const {
    if (values.empty()) throw DomainError("GriddedDistribution: empty grid");
    if (xq <= x_min) return values.front();
    if (xq >= x_max()) return values.back();
    const double t = (xq - x_min) / h;
    auto j = static_cast<std::size_t>(std::floor(t));
    if (j + 1 >= values.size()) return values.back();
    // Four-point Lagrange stencil kept on one side of x = 0, where the
    // density may jump.
    const std::size_t n = values.size();
    if (n < 4) {
        const double f = t - static_cast<double>(j);
        return (1.0 - f) * values[j] + f * values[j + 1];
    }
    const std::size_t zero = zero_index();
    std::size_t lo = j == 0 ? 0 : j - 1;
    if (zero != npos && j < zero) lo = std::min(lo, zero >= 3 ? zero - 3 : 0);
    if (zero != npos && j >= zero) lo = std::max(lo, zero);
    lo = std::min(lo, n - 4);
    Matrix out = Matrix::Zero(values[0].rows(), values[0].cols());
    for (std::size_t a = lo; a < lo + 4; ++a) {
        double w = 1.0;
        for (std::size_t b = lo; b < lo + 4; ++b)
            if (b != a) w *= (t - static_cast<double>(b)) / (static_cast<double>(a) - static_cast<double>(b));
        out += w * values[a];
    }
    return out;
}

namespace detail {

std::vector<Complex> centered_inverse(std::vector<Complex> g, double dy) {
    const std::size_t n = g.size();
    for (std::size_t k = 1; k < n; k += 2) g[k] = -g[k];
    Eigen::FFT<double> fft;
    std::vector<Complex> out;
    fft.fwd(out, g);
    const double scale = dy / (2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < n; ++j) out[j] *= (j % 2 == 1 ? -scale : scale);
    return out;
}

}  // namespace detail

namespace {
// (1/2pi) int e^{-iyx} g(y) dy at x_j = (j - n/2) h with dy h = 2pi/n.
struct DriftOnlyPart {
    Matrix d0;       // sI + Lambda + N(I - P o f(0))
    Matrix abs_a;    // |A| in canonical coordinates (zero in zero-drift mode)
    Matrix total;    // s D0^{-1}
    bool zero_drift;
};

DriftOnlyPart drift_only_part(const CanonicalView& view) {
    const auto& spec = view.evaluator().spec();
    const int m = spec.m;
    const Matrix id = Matrix::Identity(m, m);
    DriftOnlyPart d;
    d.d0 = view.s() * id + Matrix(spec.lambda.asDiagonal()) +
           Matrix(spec.nu.asDiagonal()) * (id - switch_zero_matrix(spec));
    d.abs_a = (-static_cast<double>(view.sigma()) * spec.a).asDiagonal();
    d.total = view.s() * checked_inverse(d.d0, "drift-only resolvent");
    d.zero_drift = spec.zero_drift;
    return d;
}

CMatrix drift_only_transform(const DriftOnlyPart& d, double s, Complex u) {
    CMatrix a = d.d0.cast<Complex>() + u * d.abs_a.cast<Complex>();
    return s * checked_inverse(a, "drift-only resolvent");
}

}  // namespace

GriddedDistribution invert_canonical(const CanonicalView& view, const GridParams& params) {
    const std::size_t n = params.n;
    if (n < 16 || (n & (n - 1)) != 0) throw DomainError("invert: grid size must be a power of two >= 16");
    const int m = view.m();
    const double s = view.s();
    const double eta = std::isfinite(view.u_minus()) ? -view.u_minus() : std::numeric_limits<double>::infinity();
    const double up = std::isfinite(view.u_plus()) ? view.u_plus() : std::numeric_limits<double>::infinity();
    double rate = params.negative_only ? eta : std::min(eta, up);
    if (!std::isfinite(rate)) rate = 1.0;
    const double span = params.x_span > 0.0 ? params.x_span : 40.0 / rate;
    const double h = 2.0 * span / static_cast<double>(n);
    const double dy = std::numbers::pi / span;
    const auto part = drift_only_part(view);

    GriddedDistribution dist;
    dist.s = s;
    dist.x_min = -span;
    dist.h = h;
    dist.atom0 = part.zero_drift ? part.total : Matrix::Zero(m, m);
    const std::size_t half = n / 2;
    dist.values.assign(params.negative_only ? half + 1 : n + 1, Matrix::Zero(m, m));

    // Zero-drift mode: L - P~0 ~ B/u at infinity; remove it with the
    // transform B/(u - beta) of the density -B e^{-beta x} on x > 0.
    const double beta = std::isfinite(up) ? up : 2.0;
    Matrix b_coef = Matrix::Zero(m, m);
    if (part.zero_drift) {
        const Complex far{0.0, 1e8};
        const Matrix nf0 = Matrix(view.evaluator().spec().nu.asDiagonal()) * switch_zero_matrix(view.evaluator().spec());
        const CMatrix j1 = far * (view.evaluator().jump_transform(static_cast<double>(view.sigma()) * far) - nf0.cast<Complex>());
        b_coef = part.total * j1.real() * part.total / s;
    }
    auto transform_difference = [&](Complex u) -> CMatrix {
        CMatrix d = view.L(u) - drift_only_transform(part, s, u);
        if (part.zero_drift) d -= b_coef.cast<Complex>() / (u - beta);
        return d;
    };

    double err = 0.0;
    // x <= 0: F(x) = F_S(x) + e^{gx} (1/2pi) int e^{-iyx} [-(L - S)(u)/u] dy, u = -g + iy.
    {
        const double g = std::isfinite(eta) ? 0.5 * eta : 1.0;
        std::vector<std::vector<Complex>> samples(m * m, std::vector<Complex>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const Complex u{-g, (static_cast<double>(k) - static_cast<double>(half)) * dy};
            const CMatrix v = -transform_difference(u) / u;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) samples[a * m + b][k] = v(a, b);
        }
        Matrix fs = Matrix::Zero(m, m);
        Matrix step = Matrix::Identity(m, m);
        Matrix gen_inv_scaled;
        if (!part.zero_drift) {
            const Matrix abs_a_inv = checked_inverse(part.abs_a, "|A|");
            const Matrix gen = abs_a_inv * part.d0;
            gen_inv_scaled = s * checked_inverse(gen, "|A|^{-1} D0");
            // Walk e^{Gx} down from x = 0; stepping upward would amplify rounding.
            fs = abs_a_inv;
            step = expm(Matrix(-h * gen));
        }
        std::vector<std::vector<Complex>> inv(m * m);
        for (int e = 0; e < m * m; ++e) inv[e] = detail::centered_inverse(samples[e], dy);
        for (std::size_t jj = 0; jj <= half; ++jj) {
            const std::size_t j = half - jj;
            const double x = dist.x(j);
            Matrix val(m, m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) val(a, b) = std::exp(g * x) * inv[a * m + b][j].real();
            if (!part.zero_drift) {
                val += gen_inv_scaled * fs;
                fs = step * fs;
            }
            dist.values[j] = val;
        }
        for (int e = 0; e < m * m; ++e) {
            err = std::max(err, std::abs(inv[e][0]) * std::exp(-g * span));
            err = std::max(err, std::abs(samples[e][0]) * dy * static_cast<double>(half) / (3.0 * std::numbers::pi));
        }
    }
    if (!params.negative_only) {
        // x > 0: P{xi >= x} = e^{-gx} (1/2pi) int e^{-iyx} [(L - S)(u)/u] dy, u = g + iy.
        const double g = std::isfinite(up) ? 0.5 * up : 1.0;
        std::vector<std::vector<Complex>> samples(m * m, std::vector<Complex>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const Complex u{g, (static_cast<double>(k) - static_cast<double>(half)) * dy};
            const CMatrix v = transform_difference(u) / u;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) samples[a * m + b][k] = v(a, b);
        }
        std::vector<std::vector<Complex>> inv(m * m);
        for (int e = 0; e < m * m; ++e) inv[e] = detail::centered_inverse(samples[e], dy);
        const Matrix& ps = view.Ps();
        for (std::size_t j = half + 1; j <= n; ++j) {
            const double x = dist.x(j);
            const std::size_t idx = j % n;
            Matrix tail(m, m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) tail(a, b) = std::exp(-g * x) * inv[a * m + b][idx].real();
            if (part.zero_drift) tail -= b_coef * (std::exp(-beta * x) / beta);
            dist.values[j] = ps - tail;
        }
        for (int e = 0; e < m * m; ++e) {
            err = std::max(err, std::abs(inv[e][half]) * std::exp(-g * span));
            err = std::max(err, std::abs(samples[e][0]) * dy * static_cast<double>(half) / (3.0 * std::numbers::pi));
        }
    }
    dist.error_estimate = err;
    return dist;
}

GriddedDistribution reflect(const GriddedDistribution& dist, const Matrix& total) {
    GriddedDistribution out;
    out.s = dist.s;
    out.h = dist.h;
    out.x_min = -dist.x_max();
    out.atom0 = dist.atom0;
    out.error_estimate = dist.error_estimate;
    const std::size_t n = dist.size();
    const std::size_t zero = dist.zero_index();
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = n - 1 - j;
        out.values[j] = total - dist.values[src];
        if (src == zero) out.values[j] -= dist.atom0;
    }
    return out;
}

GriddedDistribution invert_xi_distribution(const ModelSpec& spec, double s, const GridParams& params) {
    CumulantEvaluator ev(spec);
    const int sigma = orientation_sign(spec.orientation);
    CanonicalView view(ev, sigma, s);
    if (sigma > 0) return invert_canonical(view, params);
    if (params.negative_only) throw DomainError("invert: negative_only is available for upper models only");
    return reflect(invert_canonical(view, params), view.Ps());
}

CMatrix stieltjes_minus(const GriddedDistribution& dist, Complex u) {
    const std::size_t zero = dist.zero_index();
    if (zero == GriddedDistribution::npos) throw DomainError("stieltjes_minus: grid must contain x = 0");
    // int_{(x0,0)} e^{ux} dP = P(0-) - e^{u x0} P(x0) - u int_{x0}^0 e^{ux} P(x) dx
    std::vector<CMatrix> f(zero + 1);
    for (std::size_t j = 0; j <= zero; ++j) f[j] = std::exp(u * dist.x(j)) * dist.values[j].cast<Complex>();
    return f[zero] - f[0] - u * simpson(f, dist.h);
}

CMatrix retransform(const GriddedDistribution& dist, Complex u) {
    const std::size_t zero = dist.zero_index();
    if (zero == GriddedDistribution::npos) throw DomainError("retransform: grid must contain x = 0");
    CMatrix out = stieltjes_minus(dist, u) + dist.atom0.cast<Complex>();
    const std::size_t n = dist.size();
    if (zero + 1 >= n) return out;
    // int_{(0,X)} e^{ux} dP = G(0+) - e^{uX} G(X) + u int_0^X e^{ux} G(x) dx, G = total - P.
    const Matrix total = dist.values.back();
    std::vector<CMatrix> f(n - zero);
    for (std::size_t j = zero; j < n; ++j) {
        Matrix g = total - dist.values[j];
        if (j == zero) g -= dist.atom0;
        f[j - zero] = std::exp(u * dist.x(j)) * g.cast<Complex>();
    }
    out += f.front() - f.back() + u * simpson(f, dist.h);
    return out;
}

Matrix minus_projection_moment(const GriddedDistribution& dist, const Vector& column_rates) {
    const int m = dist.m();
    if (column_rates.size() != m) throw DomainError("minus_projection_moment: rate vector has wrong length");
    Matrix out(m, m);
    for (int r = 0; r < m; ++r) {
        if (!(column_rates(r) > 0.0)) throw DomainError("minus_projection_moment: rates must be positive");
        out.col(r) = stieltjes_minus(dist, Complex{column_rates(r), 0.0}).col(r).real();
    }
    return out;
}

Matrix minus_projection_moment(const GriddedDistribution& dist, double c) {
    return minus_projection_moment(dist, Vector::Constant(dist.m(), c));
}

GriddedDistribution exp_smooth_convolution_grid(const GriddedDistribution& dist, const Vector& c, KernelSide side) {
    const int m = dist.m();
    if (c.size() != m) throw DomainError("exp_smooth_convolution: rate vector has wrong length");
    const std::size_t zero = dist.zero_index();
    GriddedDistribution out = dist;
    out.atom0 = Matrix::Zero(m, m);
    std::vector<CellWeights> w(m);
    for (int k = 0; k < m; ++k) {
        if (!(c(k) > 0.0)) throw DomainError("exp_smooth_convolution: rates must be positive");
        w[k] = cell_weights(c(k), dist.h);
    }
    auto rate_of = [&](int a, int b) { return side == KernelSide::left ? a : b; };
    Matrix acc(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) acc(a, b) = dist.values[0](a, b) / c(rate_of(a, b));
    out.values[0] = acc;
    for (std::size_t j = 1; j < dist.size(); ++j) {
        Matrix below = dist.values[j - 1];
        if (j - 1 == zero) below += dist.atom0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const auto& cw = w[rate_of(a, b)];
                acc(a, b) = cw.decay * acc(a, b) + cw.w0 * dist.values[j](a, b) + cw.w1 * below(a, b);
            }
        out.values[j] = acc;
    }
    double cmin = c.minCoeff();
    out.error_estimate = dist.error_estimate / cmin;
    return out;
}

Matrix exp_smooth_convolution(const GriddedDistribution& dist, const Vector& c, double x, KernelSide side) {
    if (x < dist.x_min || x > dist.x_max()) throw DomainError("exp_smooth_convolution: x outside the grid");
    return exp_smooth_convolution_grid(dist, c, side).at(x);
}

void write_csv(std::ostream& os, const GriddedDistribution& dist, std::size_t stride) {
    const int m = dist.m();
    if (stride == 0) stride = 1;
    os.precision(17);
    os << "# s=" << dist.s << " error_estimate=" << dist.error_estimate << "\n";
    os << "# atom0 k,r,value\n";
    for (int k = 0; k < m; ++k)
        for (int r = 0; r < m; ++r) os << "# atom0," << k << "," << r << "," << dist.atom0(k, r) << "\n";
    os << "x,k,r,value\n";
    for (std::size_t j = 0; j < dist.size(); j += stride)
        for (int k = 0; k < m; ++k)
            for (int r = 0; r < m; ++r) os << dist.x(j) << "," << k << "," << r << "," << dist.values[j](k, r) << "\n";
}

}  // namespace mawhf
