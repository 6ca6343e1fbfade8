#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace mawhf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using CMatrix = Eigen::MatrixXcd;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the model class or outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Reciprocal condition estimate below this is treated as singular.
inline constexpr double kMinRcond = 1e-12;

/// Inverse by partial-pivot LU with a conditioning guard.
Matrix checked_inverse(const Matrix& a, const std::string& what);
CMatrix checked_inverse(const CMatrix& a, const std::string& what);

/// Solves x * a = b for x (right division), with the same guard.
Matrix right_solve(const Matrix& b, const Matrix& a, const std::string& what);

/// e^{a} by scaling and squaring with a degree-13 Pade approximant.
Matrix expm(const Matrix& a);

double max_abs(const Matrix& a);
double max_abs(const CMatrix& a);

/// Eigenvalue of a real matrix with the largest real part (Perron root for
/// essentially nonnegative matrices).
double dominant_real_eigenvalue(const Matrix& a);
double min_real_eigenvalue(const Matrix& a);

}  // namespace mawhf
