#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace cpa {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce an angle to [0, 2*pi).
double wrap_two_pi(double x);
/// Reduce an angle to (-pi, pi].
double wrap_pm_pi(double x);

/// Dense row-major complex matrix. Everything in this project is small
/// (<= 16 modes, <= a few hundred Fock states), so no sparsity or blocking.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);
  static ComplexMatrix identity(int n);
  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<cdouble>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  cdouble& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const cdouble& at(int i, int j) const {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }

  const std::vector<cdouble>& entries() const { return data_; }

  bool all_finite() const;

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;

  /// Matrix-vector product; v.size() must equal cols().
  std::vector<cdouble> apply(const std::vector<cdouble>& v) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cdouble> data_;
};

/// max_ij |a_ij - b_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// Frobenius norm of (a - b).
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace cpa
