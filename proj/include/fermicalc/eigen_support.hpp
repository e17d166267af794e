#pragma once

// Floating-point spectral helpers backed by Eigen. Used for reporting and for
// building explicit Gram vectors; exact pass/fail decisions never rely on them.

#include "linalg.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace fermicalc {

inline Eigen::MatrixXd to_eigen(const Matrix<double>& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return m;
}

inline std::vector<double> symmetric_eigenvalues(const Matrix<double>& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline double min_eigenvalue(const Matrix<double>& a) {
  if (a.rows() == 0) return 0.0;
  return symmetric_eigenvalues(a).front();
}

/// Symmetric square root B (B B = A) of a PSD matrix; tiny negative
/// eigenvalues from rounding are clamped to zero. Column j of B is the Gram
/// vector of index j.
inline Matrix<double> psd_square_root(const Matrix<double>& a, double tolerance = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
  Eigen::VectorXd ev = solver.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tolerance * scale) throw std::domain_error("matrix is not positive semidefinite");
    ev(i) = ev(i) < 0 ? 0.0 : std::sqrt(ev(i));
  }
  Eigen::MatrixXd root = solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
  Matrix<double> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = root(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace fermicalc
