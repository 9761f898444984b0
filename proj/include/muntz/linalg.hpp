// Dense symmetric kernels for the finite-section pencils: Cholesky
// factorization, congruence reduction, cyclic Jacobi, and the
// symmetric-definite generalized eigenproblem A v = nu B v.  Sections are
// desk-scale by design (n <= 64), so everything is plain O(n^3),
// single-threaded, and deterministic.
#pragma once

#include <cstddef>
#include <vector>

namespace muntz::linalg {

inline constexpr std::size_t kMaxSection = 64;

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0);
  static Matrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }

  bool symmetric(double tol = 1e-8) const;  // relative to max(1, ||.||_F)
  double frobenius() const;
  double off_diagonal_norm() const;
  void symmetrize();  // average away roundoff skew

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

// B = L L^T with L lower triangular; throws std::runtime_error when a pivot
// fails to be strictly positive (B not numerically positive definite).
Matrix cholesky(const Matrix& B);

// Solve L Y = X columnwise for Y, L lower triangular with nonzero diagonal.
Matrix forward_solve(const Matrix& L, const Matrix& X);

// C = L^{-1} A L^{-T}, symmetrized on exit.
Matrix congruence_reduce(const Matrix& A, const Matrix& L);

// Eigenvalues of a symmetric matrix, descending.  Cyclic Jacobi sweeps run
// until the off-diagonal Frobenius norm drops below tol * max(1, ||C||_F).
std::vector<double> jacobi_eigenvalues(Matrix C, double tol = 1e-12);

// largest eigenvalue / smallest eigenvalue of a symmetric positive definite
// matrix; +inf when the smallest eigenvalue is not strictly positive.
double spd_condition(const Matrix& B);

struct GeneralizedEigenOptions {
  double jacobi_tol = 1e-12;
  double max_condition = 1e14;  // refuse a B worse than this
};

// Eigenvalues nu (descending) of A v = nu B v with B positive definite, via
// Cholesky + congruence + Jacobi.  Throws when B exceeds the condition cap,
// with a hint to renormalize the basis or shrink the section.
std::vector<double> generalized_eigenvalues(
    const Matrix& A, const Matrix& B, const GeneralizedEigenOptions& opt = {});

}  // namespace muntz::linalg
