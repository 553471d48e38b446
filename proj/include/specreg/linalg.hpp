#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace specreg::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigensystem of a real symmetric matrix, eigenvalues sorted descending.
/// Column j of `eigenvectors` pairs with `eigenvalues[j]`.
struct SymEig {
  Vector eigenvalues;
  Matrix eigenvectors;

  Eigen::Index source_dim() const { return eigenvalues.size(); }
  double max_eigenvalue() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
  /// Default numerical-rank threshold: n * eps * max(lambda_max, 0).
  double default_rank_tol() const;
};

/// Throws NonSymmetric when ||M - M^T||_max > 1e-12 * ||M||_max.
SymEig sym_eig(const Matrix& m);

/// Q phi(Lambda) Q^T.  Throws NonFinite if phi yields NaN/Inf on any eigenvalue.
Matrix apply_spectral_function(const SymEig& e, const std::function<double(double)>& phi);

/// Q phi(Lambda) Q^T b without forming the matrix.
Vector apply_spectral_function(const SymEig& e, const std::function<double(double)>& phi,
                               const Vector& b);

/// Pseudoinverse applied to b.  Eigenvalues <= rank_tol are treated as zero.
Vector pinv_apply(const SymEig& e, const Vector& b, std::optional<double> rank_tol = std::nullopt);

}  // namespace specreg::linalg
