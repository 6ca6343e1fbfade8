#pragma once

#include "mawhf/model.hpp"

namespace mawhf {

/// Closed-form evaluation of the matrix cumulant of a validated model.
///
/// The natural variable internally is the Laplace argument u = i*alpha, so
/// that K(u) = Psi(-i u) is real for real u. The admissible region is the
/// vertical strip lo < Re u < hi where every jump transform converges; in
/// terms of alpha this is -hi < Im(alpha) < -lo.
class CumulantEvaluator {
public:
    explicit CumulantEvaluator(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }
    int m() const { return spec_.m; }

    /// Bounds of the convergence strip in the Laplace variable (may be +-inf).
    double strip_lo() const { return lo_; }
    double strip_hi() const { return hi_; }
    bool in_strip(Complex u) const { return u.real() > lo_ && u.real() < hi_; }

    /// Psi(alpha) for complex alpha inside the strip.
    CMatrix eval_psi(Complex alpha) const;
    /// Phi(s, alpha) = s (sI - Psi(alpha))^{-1}.
    CMatrix eval_phi(double s, Complex alpha) const;
    /// K(r) = Psi(-i r), real argument.
    Matrix eval_K(double r) const;
    /// K at a complex Laplace argument.
    CMatrix laplace_exponent(Complex u) const;
    /// K continued across the exponential-jump side of the strip (rational
    /// there); poles at the exponential rates.
    CMatrix continued_exponent(Complex u) const;
    /// s (sI - K(u))^{-1} at a complex Laplace argument.
    CMatrix laplace_resolvent(double s, Complex u) const;

    /// Kbar_0(x): tail of the exponential (upward) jump measure, x > 0.
    Matrix k0_tail(double x) const;

    /// Sum of jump-transform terms of K(u) (everything except the drift and
    /// the -Lambda - N compensators).
    CMatrix jump_transform(Complex u) const;

    const Matrix& generator() const { return q_; }

private:
    void require_strip(Complex u, const char* what) const;

    ModelSpec spec_;
    Matrix q_;
    int sigma_;
    double lo_;
    double hi_;
};

}  // namespace mawhf
