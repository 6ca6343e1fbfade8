#include "mawhf/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <limits>

namespace mawhf {

namespace {

template <typename M>
M guarded_inverse(const M& a, const std::string& what) {
    if (a.rows() != a.cols()) throw DomainError(what + ": matrix is not square");
    Eigen::PartialPivLU<M> lu(a);
    const double rc = lu.rcond();
    if (!(rc > kMinRcond)) {
        throw NumericalError(what + ": matrix is singular (rcond=" + std::to_string(rc) + ")");
    }
    return lu.inverse();
}

}  // namespace

Matrix checked_inverse(const Matrix& a, const std::string& what) { return guarded_inverse(a, what); }

CMatrix checked_inverse(const CMatrix& a, const std::string& what) { return guarded_inverse(a, what); }

Matrix right_solve(const Matrix& b, const Matrix& a, const std::string& what) {
    // x a = b  <=>  a^T x^T = b^T
    Eigen::PartialPivLU<Matrix> lu(a.transpose());
    if (!(lu.rcond() > kMinRcond)) throw NumericalError(what + ": matrix is singular");
    return lu.solve(b.transpose()).transpose();
}

Matrix expm(const Matrix& a) { return a.exp(); }

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double dominant_real_eigenvalue(const Matrix& a) {
    if (a.rows() == 1) return a(0, 0);
    Eigen::EigenSolver<Matrix> es(a, false);
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
    return best;
}

double min_real_eigenvalue(const Matrix& a) {
    if (a.rows() == 1) return a(0, 0);
    Eigen::EigenSolver<Matrix> es(a, false);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::min(best, es.eigenvalues()[i].real());
    return best;
}

}  // namespace mawhf
