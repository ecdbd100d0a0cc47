#include "mpsehmm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mpsehmm {

namespace {

void require_finite(std::span<const Complex> values, const char* what) {
  for (const Complex& z : values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericalError(std::string(what) + ": non-finite entry");
    }
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    throw DimensionError(os.str());
  }
}

// Row-major strides for lexicographic ordering.
std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

}  // namespace

bool Tolerance::close(double x, double y) const {
  return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
}

bool Tolerance::close(Complex x, Complex y) const {
  return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: entry count does not match rows*cols");
  }
  require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(Complex s) {
  for (Complex& z : data_) z *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, Complex s) { return a *= s; }
Matrix operator*(Complex s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matrix product: inner dimensions " << a.cols() << " and " << b.rows();
    throw DimensionError(os.str());
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix dagger(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

Matrix conjugate(const Matrix& a) {
  Matrix out = a;
  for (Complex& z : out.data()) z = std::conj(z);
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix schur(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "schur");
  Matrix out = a;
  auto od = out.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < od.size(); ++k) od[k] *= bd[k];
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

Complex trace(const Matrix& a) {
  if (!a.square()) throw DimensionError("trace: matrix not square");
  Complex t{};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (const Complex& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  return worst;
}

double hermiticity_defect(const Matrix& a) {
  if (!a.square()) throw DimensionError("hermiticity_defect: matrix not square");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(s);
}

double unitarity_defect(const Matrix& a) {
  return frobenius_norm(dagger(a) * a - Matrix::identity(a.cols()));
}

// ---------------------------------------------------------------------------
// TensorVector

std::size_t product_of(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

TensorVector::TensorVector(std::vector<std::size_t> factor_dims)
    : dims_(std::move(factor_dims)), data_(product_of(dims_), Complex{}) {
  for (std::size_t d : dims_)
    if (d == 0) throw DimensionError("TensorVector: zero factor dimension");
}

TensorVector::TensorVector(std::vector<std::size_t> factor_dims, std::vector<Complex> entries)
    : dims_(std::move(factor_dims)), data_(std::move(entries)) {
  for (std::size_t d : dims_)
    if (d == 0) throw DimensionError("TensorVector: zero factor dimension");
  if (data_.size() != product_of(dims_))
    throw DimensionError("TensorVector: entry count does not match factor dims");
  require_finite(data_, "TensorVector");
}

TensorVector TensorVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("TensorVector::basis: index out of range");
  TensorVector v({dim});
  v[index] = 1.0;
  return v;
}

std::size_t TensorVector::flat_index(std::span<const std::size_t> multi_index) const {
  if (multi_index.size() != dims_.size())
    throw DimensionError("TensorVector: multi-index has wrong arity");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (multi_index[k] >= dims_[k]) throw DimensionError("TensorVector: index out of range");
    flat = flat * dims_[k] + multi_index[k];
  }
  return flat;
}

Complex TensorVector::at(std::span<const std::size_t> multi_index) const {
  return data_[flat_index(multi_index)];
}

double TensorVector::norm() const {
  double s = 0.0;
  for (const Complex& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

TensorVector& TensorVector::operator*=(Complex s) {
  for (Complex& z : data_) z *= s;
  return *this;
}

Complex inner(const TensorVector& a, const TensorVector& b) {
  if (a.factor_dims() != b.factor_dims()) throw DimensionError("inner: factor dims differ");
  Complex s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

TensorVector tensor_product(const TensorVector& a, const TensorVector& b) {
  std::vector<std::size_t> dims = a.factor_dims();
  dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
  TensorVector out(std::move(dims));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

double max_abs_diff(const TensorVector& a, const TensorVector& b) {
  if (a.factor_dims() != b.factor_dims()) throw DimensionError("max_abs_diff: factor dims differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

TensorVector permute_factors(const TensorVector& v, std::span<const std::size_t> perm) {
  const auto& dims = v.factor_dims();
  const std::size_t f = dims.size();
  if (perm.size() != f) throw DimensionError("permute_factors: permutation has wrong length");
  std::vector<bool> seen(f, false);
  for (std::size_t p : perm) {
    if (p >= f || seen[p]) throw DimensionError("permute_factors: not a permutation");
    seen[p] = true;
  }
  std::vector<std::size_t> out_dims(f);
  for (std::size_t p = 0; p < f; ++p) out_dims[p] = dims[perm[p]];

  const auto in_strides = strides_of(dims);
  // Stride in the input for each output factor.
  std::vector<std::size_t> step(f);
  for (std::size_t p = 0; p < f; ++p) step[p] = in_strides[perm[p]];

  TensorVector out(out_dims);
  std::vector<std::size_t> idx(f, 0);
  std::size_t src = 0;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = v[src];
    // odometer over output indices, rightmost fastest
    for (std::size_t p = f; p-- > 0;) {
      if (++idx[p] < out_dims[p]) {
        src += step[p];
        break;
      }
      src -= step[p] * (out_dims[p] - 1);
      idx[p] = 0;
    }
  }
  return out;
}

TensorVector partial_inner_product(const TensorVector& w, const TensorVector& u0,
                                   std::size_t prefix_count) {
  const auto& dims = w.factor_dims();
  if (prefix_count == 0 || prefix_count > dims.size())
    throw DimensionError("partial_inner_product: prefix_count out of range");
  if (!std::equal(u0.factor_dims().begin(), u0.factor_dims().end(), dims.begin(),
                  dims.begin() + static_cast<std::ptrdiff_t>(prefix_count)) ||
      u0.factor_count() != prefix_count) {
    throw DimensionError("partial_inner_product: u0 factor dims do not match the prefix of w");
  }
  std::vector<std::size_t> rest(dims.begin() + static_cast<std::ptrdiff_t>(prefix_count), dims.end());
  const std::size_t rest_size = product_of(rest);
  // An empty remainder is represented as a single factor of dimension 1.
  TensorVector out(rest.empty() ? std::vector<std::size_t>{1} : rest);
  for (std::size_t a = 0; a < u0.size(); ++a) {
    const Complex c = std::conj(u0[a]);
    if (c == Complex{}) continue;
    const std::size_t base = a * rest_size;
    for (std::size_t b = 0; b < rest_size; ++b) out[b] += c * w[base + b];
  }
  return out;
}

Matrix outer(const TensorVector& v) {
  Matrix m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

namespace {

std::vector<std::size_t> validated_complement(std::span<const std::size_t> factor_dims,
                                              std::span<const std::size_t> keep) {
  std::vector<bool> kept(factor_dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= factor_dims.size()) throw DimensionError("partial trace: factor index out of range");
    if (kept[k]) throw DimensionError("partial trace: repeated factor index");
    kept[k] = true;
  }
  for (std::size_t k = 1; k < keep.size(); ++k)
    if (keep[k] <= keep[k - 1]) throw DimensionError("partial trace: keep indices must ascend");
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < factor_dims.size(); ++k)
    if (!kept[k]) traced.push_back(k);
  return traced;
}

}  // namespace

Matrix partial_trace(const Matrix& rho, std::span<const std::size_t> factor_dims,
                     std::span<const std::size_t> keep) {
  const std::size_t total = product_of(factor_dims);
  if (!rho.square() || rho.rows() != total)
    throw DimensionError("partial_trace: matrix dimension does not match factor dims");
  const auto traced = validated_complement(factor_dims, keep);

  std::vector<std::size_t> keep_dims, traced_dims;
  for (std::size_t k : keep) keep_dims.push_back(factor_dims[k]);
  for (std::size_t k : traced) traced_dims.push_back(factor_dims[k]);
  const std::size_t nk = product_of(keep_dims);
  const std::size_t nt = product_of(traced_dims);
  const auto strides = strides_of(factor_dims);

  // Flat offsets in the full space of each kept / traced configuration.
  auto offsets = [&](std::span<const std::size_t> which, std::span<const std::size_t> sub_dims) {
    std::vector<std::size_t> off(product_of(sub_dims), 0);
    std::vector<std::size_t> idx(which.size(), 0);
    for (std::size_t flat = 0; flat < off.size(); ++flat) {
      std::size_t o = 0;
      for (std::size_t p = 0; p < which.size(); ++p) o += idx[p] * strides[which[p]];
      off[flat] = o;
      for (std::size_t p = which.size(); p-- > 0;) {
        if (++idx[p] < sub_dims[p]) break;
        idx[p] = 0;
      }
    }
    return off;
  };
  const auto keep_off = offsets(keep, keep_dims);
  const auto trace_off = offsets(traced, traced_dims);

  Matrix out(nk, nk);
  for (std::size_t a = 0; a < nk; ++a)
    for (std::size_t b = 0; b < nk; ++b) {
      Complex s{};
      for (std::size_t t = 0; t < nt; ++t) s += rho(keep_off[a] + trace_off[t], keep_off[b] + trace_off[t]);
      out(a, b) = s;
    }
  return out;
}

Matrix reduced_density(const TensorVector& v, std::span<const std::size_t> keep) {
  const auto& dims = v.factor_dims();
  const auto traced = validated_complement(dims, keep);
  // Bring traced factors to the front, then rho_keep = Psi^T conj(Psi) with Psi viewed as (traced x kept).
  std::vector<std::size_t> perm(traced.begin(), traced.end());
  perm.insert(perm.end(), keep.begin(), keep.end());
  const TensorVector p = permute_factors(v, perm);
  std::size_t nk = 1;
  for (std::size_t k : keep) nk *= dims[k];
  const std::size_t nt = p.size() / nk;
  Matrix out(nk, nk);
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t base = t * nk;
    for (std::size_t a = 0; a < nk; ++a) {
      const Complex pa = p[base + a];
      if (pa == Complex{}) continue;
      for (std::size_t b = 0; b < nk; ++b) out(a, b) += pa * std::conj(p[base + b]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Annihilates a(p,q) with the unitary J = [[c, s e], [-s conj(e), c]] acting on
// columns (p, q); a <- J^dagger a J, v <- v J.
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  const Complex e = apq / mag;
  const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex se = s * e;
  const Complex sec = s * std::conj(e);
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {  // columns
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp - sec * akq;
    a(k, q) = se * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {  // rows
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk - se * aqk;
    a(q, k) = sec * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - sec * vkq;
    v(k, q) = se * vkp + c * vkq;
  }
}

}  // namespace

HermitianSpectrum hermitian_eig(const Matrix& input) {
  if (!input.square()) throw DimensionError("hermitian_eig: matrix not square");
  const double scale = frobenius_norm(input);
  if (hermiticity_defect(input) > 1e-10 * std::max(1.0, scale))
    throw NumericalError("hermitian_eig: matrix is not Hermitian");

  const std::size_t n = input.rows();
  Matrix a = 0.5 * (input + dagger(input));
  Matrix v = Matrix::identity(n);

  constexpr int kMaxSweeps = 100;
  const double target = 1e-12 * scale;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        // negligible against both diagonal entries: drop it
        if (mag < 1e-300 || (std::abs(a(p, p)) + mag == std::abs(a(p, p)) &&
                             std::abs(a(q, q)) + mag == std::abs(a(q, q)))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        jacobi_rotate(a, v, p, q);
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  HermitianSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

Matrix log_on_support(const Matrix& a, double eps) {
  const HermitianSpectrum s = hermitian_eig(a);
  for (double lambda : s.eigenvalues) {
    if (lambda < -eps) {
      std::ostringstream os;
      os << "log_on_support: eigenvalue " << lambda << " below -eps (matrix not PSD)";
      throw NumericalError(os.str());
    }
  }
  return spectral_function(s, [eps](double lambda) { return lambda > eps ? std::log(lambda) : 0.0; });
}

}  // namespace mpsehmm
