#include "mawhf/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mawhf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

CumulantEvaluator::CumulantEvaluator(ModelSpec spec) : spec_(std::move(spec)) {
    require_valid(spec_);
    q_ = build_generator(spec_);
    sigma_ = orientation_sign(spec_.orientation);

    // Exponential jumps sit on the sigma side, mixtures on the other.
    double exp_bound = kInf;
    double mix_bound = kInf;
    for (int k = 0; k < spec_.m; ++k) {
        if (spec_.lambda(k) * spec_.pos_weight(k) > 0.0) exp_bound = std::min(exp_bound, spec_.c(k));
        if (spec_.lambda(k) * (1.0 - spec_.pos_weight(k)) > 0.0)
            mix_bound = std::min(mix_bound, spec_.neg_jump[k].min_rate());
        for (int r = 0; r < spec_.m; ++r) {
            const auto& law = spec_.switch_jump[k][r];
            if (spec_.embedded(k, r) > 0.0 && law.atom0 < 1.0) mix_bound = std::min(mix_bound, law.neg.min_rate());
        }
    }
    if (sigma_ > 0) {
        lo_ = -mix_bound;
        hi_ = exp_bound;
    } else {
        lo_ = -exp_bound;
        hi_ = mix_bound;
    }
}

void CumulantEvaluator::require_strip(Complex u, const char* what) const {
    if (!in_strip(u)) {
        std::ostringstream os;
        os << what << ": Laplace argument " << u << " outside the strip (" << lo_ << ", " << hi_ << ")";
        throw DomainError(os.str());
    }
}

CMatrix CumulantEvaluator::jump_transform(Complex u) const {
    const int m = spec_.m;
    const int side = -sigma_;
    CMatrix j = CMatrix::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        const double lam = spec_.lambda(k);
        if (lam > 0.0) {
            const double w = spec_.pos_weight(k);
            Complex t{0.0, 0.0};
            if (w > 0.0) t += w * spec_.c(k) / (spec_.c(k) - static_cast<double>(sigma_) * u);
            if (w < 1.0) t += (1.0 - w) * spec_.neg_jump[k].laplace(u, side);
            j(k, k) += lam * t;
        }
        for (int r = 0; r < m; ++r) {
            const double p = spec_.embedded(k, r);
            if (p > 0.0) j(k, r) += spec_.nu(k) * p * spec_.switch_jump[k][r].laplace(u, side);
        }
    }
    return j;
}

CMatrix CumulantEvaluator::laplace_exponent(Complex u) const {
    require_strip(u, "cumulant");
    return continued_exponent(u);
}

CMatrix CumulantEvaluator::continued_exponent(Complex u) const {
    if (sigma_ > 0 ? !(u.real() > lo_) : !(u.real() < hi_)) {
        std::ostringstream os;
        os << "cumulant: Laplace argument " << u << " beyond the non-exponential side of the strip (" << lo_ << ", "
           << hi_ << ")";
        throw DomainError(os.str());
    }
    const int m = spec_.m;
    CMatrix k = jump_transform(u);
    for (int i = 0; i < m; ++i) k(i, i) += u * spec_.a(i) - spec_.lambda(i) - spec_.nu(i);
    return k;
}

CMatrix CumulantEvaluator::eval_psi(Complex alpha) const {
    return laplace_exponent(Complex{0.0, 1.0} * alpha);
}

CMatrix CumulantEvaluator::laplace_resolvent(double s, Complex u) const {
    if (!(s > 0.0)) throw DomainError("resolvent transform: s must be positive");
    CMatrix a = -laplace_exponent(u);
    a.diagonal().array() += s;
    Eigen::PartialPivLU<CMatrix> lu(a);
    if (!(lu.rcond() > kMinRcond)) {
        std::ostringstream os;
        os << "resolvent transform: sI - K(u) singular at u = " << u << " (spectral root)";
        throw NumericalError(os.str());
    }
    return s * lu.inverse();
}

CMatrix CumulantEvaluator::eval_phi(double s, Complex alpha) const {
    return laplace_resolvent(s, Complex{0.0, 1.0} * alpha);
}

Matrix CumulantEvaluator::eval_K(double r) const { return laplace_exponent(Complex{r, 0.0}).real(); }

Matrix CumulantEvaluator::k0_tail(double x) const {
    if (sigma_ < 0) throw DomainError("k0_tail: defined for upper orientation models only");
    if (!(x > 0.0)) throw DomainError("k0_tail: x must be positive");
    const int m = spec_.m;
    Matrix t = Matrix::Zero(m, m);
    for (int k = 0; k < m; ++k) t(k, k) = spec_.lambda(k) * spec_.pos_weight(k) * std::exp(-spec_.c(k) * x);
    return t;
}

}  // namespace mawhf
