#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace fibdd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex imag_unit{0.0, 1.0};
inline constexpr double golden_ratio = 1.6180339887498948482;

/// Largest elementwise magnitude.
inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

inline double unitarity_defect(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

inline void require_hermitian(const Matrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  if (hermiticity_defect(m) > tol)
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

}  // namespace fibdd
