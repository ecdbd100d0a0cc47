#pragma once

// Independent reference computations for the tests. Everything here is plain
// index loops over explicit multi-indices; none of it calls the library
// routines under test beyond the containers themselves.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/linalg.hpp"
#include "mpsehmm/mps.hpp"
#include "mpsehmm/random.hpp"

namespace oracle {

using mpsehmm::Complex;
using mpsehmm::Matrix;
using mpsehmm::TensorVector;

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  mpsehmm::SplitMix64 rng(seed);
  Matrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double re = rng.normal();
      a(i, j) = Complex(re, rng.normal());
    }
  return a;
}

inline Matrix random_hermitian(std::size_t n, std::uint64_t seed) {
  const Matrix g = random_matrix(n, n, seed);
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
  return h;
}

inline TensorVector random_vector(std::vector<std::size_t> dims, std::uint64_t seed) {
  TensorVector v(dims);
  mpsehmm::SplitMix64 rng(seed);
  for (std::size_t f = 0; f < v.size(); ++f) {
    const double re = rng.normal();
    v[f] = Complex(re, rng.normal());
  }
  return v;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s{};
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline Matrix adjoint(const Matrix& a) {
  Matrix c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) w = std::max(w, std::abs(a(i, j) - b(i, j)));
  return w;
}

inline double max_diff(const TensorVector& a, const TensorVector& b) {
  double w = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) w = std::max(w, std::abs(a[f] - b[f]));
  return w;
}

// Calls f(index_vector) for every multi-index over dims, leftmost slowest.
inline void for_each_index(const std::vector<std::size_t>& dims,
                           const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(dims.size(), 0);
  while (true) {
    f(idx);
    std::size_t p = dims.size();
    while (p > 0) {
      --p;
      if (++idx[p] < dims[p]) break;
      idx[p] = 0;
      if (p == 0) return;
    }
    if (dims.empty()) return;
  }
}

inline std::size_t flat(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& idx) {
  std::size_t r = 0;
  for (std::size_t p = 0; p < dims.size(); ++p) r = r * dims[p] + idx[p];
  return r;
}

// Tr(A^[1]_{k1} ... A^[N]_{kN}) by summing over all closed index paths.
inline Complex trace_coefficient(const mpsehmm::SiteTensorSet& t, const std::vector<std::size_t>& word) {
  const std::size_t n = word.size();
  Complex total{};
  for_each_index(std::vector<std::size_t>(n, t.m), [&](const std::vector<std::size_t>& i) {
    Complex p = 1.0;
    for (std::size_t l = 0; l < n; ++l) p *= t.family(l + 1)[word[l]](i[l], i[(l + 1) % n]);
    total += p;
  });
  return total;
}

// Coefficient of Psi_{H,O;n} at (i_1..i_{n+1}, k_1..k_n).
inline Complex psi_hon_entry(const mpsehmm::EhmmModel& model, const std::vector<std::size_t>& h,
                             const std::vector<std::size_t>& k) {
  Complex c = std::sqrt(model.pi[h[0]]);
  for (std::size_t l = 1; l <= k.size(); ++l) {
    c *= model.hidden_at(l).entries(h[l - 1], h[l]);
    c *= model.emission_at(l)(h[l - 1], k[l - 1]);
  }
  return c;
}

}  // namespace oracle
