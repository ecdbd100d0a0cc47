#pragma once

// Dense complex linear algebra used throughout the toolkit.
//
// Conventions:
//  * matrices are row-major;
//  * tensor-product bases are ordered lexicographically with the leftmost
//    factor most significant, so a TensorVector with dims {a, b} stores the
//    entry (i, j) at flat index i * b + j, and kron(A, B) follows the same rule.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsehmm {

using Complex = std::complex<double>;

/// Thrown on shape or factor-dimension mismatches.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an input violates a numerical precondition (non-Hermitian,
/// non-PSD, non-finite, ...).
class NumericalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Absolute-plus-relative comparison: |x - y| <= atol + rtol * max(|x|, |y|).
struct Tolerance {
  double atol = 1e-10;
  double rtol = 1e-10;

  [[nodiscard]] bool close(double x, double y) const;
  [[nodiscard]] bool close(Complex x, Complex y) const;
};

inline constexpr double kDefaultSupportEps = 1e-12;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix diagonal(std::span<const double> diag);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool square() const { return rows_ == cols_; }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const Complex> data() const { return data_; }
  [[nodiscard]] std::span<Complex> data() { return data_; }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(Complex s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, Complex s);
Matrix operator*(Complex s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

[[nodiscard]] Matrix dagger(const Matrix& a);
[[nodiscard]] Matrix conjugate(const Matrix& a);
[[nodiscard]] Matrix transpose(const Matrix& a);
/// Entrywise (Schur / Hadamard) product.
[[nodiscard]] Matrix schur(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);
[[nodiscard]] Complex trace(const Matrix& a);
[[nodiscard]] double frobenius_norm(const Matrix& a);
[[nodiscard]] double max_abs_diff(const Matrix& a, const Matrix& b);
/// ||a - a^dagger||_F
[[nodiscard]] double hermiticity_defect(const Matrix& a);
/// ||a^dagger a - I||_F
[[nodiscard]] double unitarity_defect(const Matrix& a);

/// Dense vector over a tensor-product basis.
class TensorVector {
 public:
  TensorVector() = default;
  explicit TensorVector(std::vector<std::size_t> factor_dims);  // zero-filled
  TensorVector(std::vector<std::size_t> factor_dims, std::vector<Complex> entries);

  /// Basis vector e_index in a single factor of dimension dim.
  static TensorVector basis(std::size_t dim, std::size_t index);

  [[nodiscard]] const std::vector<std::size_t>& factor_dims() const { return dims_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] std::size_t factor_count() const { return dims_.size(); }

  Complex& operator[](std::size_t flat) { return data_[flat]; }
  const Complex& operator[](std::size_t flat) const { return data_[flat]; }

  /// Entry addressed by one index per factor.
  [[nodiscard]] Complex at(std::span<const std::size_t> multi_index) const;
  [[nodiscard]] std::size_t flat_index(std::span<const std::size_t> multi_index) const;

  [[nodiscard]] std::span<const Complex> data() const { return data_; }
  [[nodiscard]] std::span<Complex> data() { return data_; }

  [[nodiscard]] double norm() const;

  TensorVector& operator*=(Complex s);
  friend bool operator==(const TensorVector&, const TensorVector&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<Complex> data_;
};

[[nodiscard]] std::size_t product_of(std::span<const std::size_t> dims);

/// <a, b> = sum conj(a_i) b_i. Factor dims must agree.
[[nodiscard]] Complex inner(const TensorVector& a, const TensorVector& b);
[[nodiscard]] TensorVector tensor_product(const TensorVector& a, const TensorVector& b);
[[nodiscard]] double max_abs_diff(const TensorVector& a, const TensorVector& b);

/// Reorders factors: result factor p is input factor perm[p].
[[nodiscard]] TensorVector permute_factors(const TensorVector& v, std::span<const std::size_t> perm);

/// <w | u0>_U where U is the block made of the first prefix_count factors of w:
/// v[beta] = sum_alpha conj(u0[alpha]) * w[alpha, beta].
[[nodiscard]] TensorVector partial_inner_product(const TensorVector& w, const TensorVector& u0,
                                                 std::size_t prefix_count);

/// |v><v| as a matrix.
[[nodiscard]] Matrix outer(const TensorVector& v);

/// Reduced matrix on the factors listed in keep (kept in their original order).
[[nodiscard]] Matrix partial_trace(const Matrix& rho, std::span<const std::size_t> factor_dims,
                                   std::span<const std::size_t> keep);

/// Tr_{complement of keep} |v><v| without forming |v><v|.
[[nodiscard]] Matrix reduced_density(const TensorVector& v, std::span<const std::size_t> keep);

struct HermitianSpectrum {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // columns
};

/// Cyclic Jacobi diagonalisation of a Hermitian matrix. Throws NumericalError
/// when ||a - a^dagger||_F > 1e-10 * max(1, ||a||_F).
[[nodiscard]] HermitianSpectrum hermitian_eig(const Matrix& a);

/// V f(Lambda) V^dagger for a Hermitian matrix.
template <class F>
[[nodiscard]] Matrix spectral_function(const HermitianSpectrum& s, F&& f) {
  const std::size_t n = s.eigenvalues.size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(s.eigenvalues[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = s.eigenvectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(s.eigenvectors(j, k));
    }
  }
  return out;
}

/// Natural logarithm on the support: eigenvalues in (-eps, eps] map to 0.
/// Throws NumericalError on an eigenvalue below -eps.
[[nodiscard]] Matrix log_on_support(const Matrix& a, double eps = kDefaultSupportEps);

}  // namespace mpsehmm
