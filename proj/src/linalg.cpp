#include "muntz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace muntz::linalg {

Matrix::Matrix(std::size_t n, double fill) : n_(n), a_(n * n, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::symmetric(double tol) const {
  const double scale = std::max(1.0, frobenius());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol * scale) return false;
  return true;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Matrix::off_diagonal_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

void Matrix::symmetrize() {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = m;
      (*this)(j, i) = m;
    }
}

Matrix cholesky(const Matrix& B) {
  const std::size_t n = B.size();
  Matrix L(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = B(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "matrix is not positive definite (pivot " << d << " at index "
         << j << ")";
      throw std::runtime_error(os.str());
    }
    L(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = B(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return L;
}

Matrix forward_solve(const Matrix& L, const Matrix& X) {
  const std::size_t n = L.size();
  if (X.size() != n)
    throw std::invalid_argument("forward_solve: size mismatch");
  Matrix Y(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double s = X(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * Y(k, c);
      Y(i, c) = s / L(i, i);
    }
  return Y;
}

namespace {
Matrix transposed(const Matrix& m) {
  Matrix t(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) t(j, i) = m(i, j);
  return t;
}
}  // namespace

Matrix congruence_reduce(const Matrix& A, const Matrix& L) {
  // C = L^{-1} A L^{-T}: W = L^{-1} A, then C^T = L^{-1} W^T.
  Matrix W = forward_solve(L, A);
  Matrix C = transposed(forward_solve(L, transposed(W)));
  C.symmetrize();
  return C;
}

std::vector<double> jacobi_eigenvalues(Matrix C, double tol) {
  const std::size_t n = C.size();
  if (n == 0) return {};
  if (!C.symmetric())
    throw std::invalid_argument("Jacobi eigensolve requires a symmetric matrix");
  C.symmetrize();
  const double scale = std::max(1.0, C.frobenius());
  bool converged = false;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    if (C.off_diagonal_norm() <= tol * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = C(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (C(q, q) - C(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {  // columns p, q
          const double ckp = C(k, p), ckq = C(k, q);
          C(k, p) = c * ckp - s * ckq;
          C(k, q) = s * ckp + c * ckq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // rows p, q
          const double cpk = C(p, k), cqk = C(q, k);
          C(p, k) = c * cpk - s * cqk;
          C(q, k) = s * cpk + c * cqk;
        }
        C(p, q) = 0.0;
        C(q, p) = 0.0;
      }
  }
  if (!converged && C.off_diagonal_norm() > tol * scale)
    throw std::runtime_error("Jacobi eigensolve did not converge");
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = C(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

double spd_condition(const Matrix& B) {
  const std::vector<double> eig = jacobi_eigenvalues(B);
  if (eig.empty() || !(eig.back() > 0.0))
    return std::numeric_limits<double>::infinity();
  return eig.front() / eig.back();
}

std::vector<double> generalized_eigenvalues(const Matrix& A, const Matrix& B,
                                            const GeneralizedEigenOptions& opt) {
  const std::size_t n = A.size();
  if (B.size() != n) throw std::invalid_argument("pencil matrices differ in size");
  if (n == 0) throw std::invalid_argument("empty pencil");
  if (n > kMaxSection) {
    std::ostringstream os;
    os << "section size " << n << " exceeds the supported maximum of "
       << kMaxSection;
    throw std::invalid_argument(os.str());
  }
  if (!A.symmetric() || !B.symmetric())
    throw std::invalid_argument("pencil matrices must be symmetric");
  const double cond = spd_condition(B);
  if (!(cond < opt.max_condition)) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << "Gram matrix condition " << cond
       << " exceeds the cap " << opt.max_condition
       << "; switch to normalized or Riesz scaling, or reduce the section "
          "size";
    throw std::runtime_error(os.str());
  }
  const Matrix L = cholesky(B);
  const Matrix C = congruence_reduce(A, L);
  return jacobi_eigenvalues(C, opt.jacobi_tol);
}

}  // namespace muntz::linalg
