#include "specreg/linalg.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "specreg/error.hpp"

namespace specreg::linalg {

double SymEig::default_rank_tol() const {
  const double lmax = std::max(max_eigenvalue(), 0.0);
  return static_cast<double>(source_dim()) * std::numeric_limits<double>::epsilon() * lmax;
}

SymEig sym_eig(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorCode::DimensionZero, "empty matrix");
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has NaN/Inf entries");

  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw Error(ErrorCode::NonSymmetric, "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }

  // Eigen returns ascending order; reverse into descending.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonFinite, "eigensolver did not converge");

  SymEig out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

namespace {

Vector mapped_eigenvalues(const SymEig& e, const std::function<double(double)>& phi) {
  Vector d(e.source_dim());
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    d[j] = phi(e.eigenvalues[j]);
    if (!std::isfinite(d[j])) {
      throw Error(ErrorCode::NonFinite,
                  "spectral function is not finite at eigenvalue " + std::to_string(e.eigenvalues[j]));
    }
  }
  return d;
}

}  // namespace

Matrix apply_spectral_function(const SymEig& e, const std::function<double(double)>& phi) {
  const Vector d = mapped_eigenvalues(e, phi);
  const Matrix& q = e.eigenvectors;
  Matrix out = q * d.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

Vector apply_spectral_function(const SymEig& e, const std::function<double(double)>& phi,
                               const Vector& b) {
  if (b.size() != e.source_dim()) throw Error(ErrorCode::DimensionMismatch, "vector length mismatch");
  const Vector d = mapped_eigenvalues(e, phi);
  const Matrix& q = e.eigenvectors;
  return q * (d.asDiagonal() * (q.transpose() * b));
}

Vector pinv_apply(const SymEig& e, const Vector& b, std::optional<double> rank_tol) {
  if (b.size() != e.source_dim()) throw Error(ErrorCode::DimensionMismatch, "vector length mismatch");
  const double tol = rank_tol.value_or(e.default_rank_tol());
  if (tol < 0.0) throw Error(ErrorCode::InvalidInput, "rank_tol must be non-negative");
  const Matrix& q = e.eigenvectors;
  Vector coeffs = q.transpose() * b;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    coeffs[j] = e.eigenvalues[j] > tol ? coeffs[j] / e.eigenvalues[j] : 0.0;
  }
  return q * coeffs;
}

}  // namespace specreg::linalg
