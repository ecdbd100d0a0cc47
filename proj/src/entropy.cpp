#include "mpsehmm/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mpsehmm/bridge.hpp"

namespace mpsehmm {

namespace {

std::size_t checked_words(std::size_t d, std::size_t n_sites, std::size_t max_words, const char* op) {
  if (n_sites == 0) throw std::invalid_argument(std::string(op) + ": N must be positive");
  std::size_t words = 1;
  for (std::size_t l = 0; l < n_sites; ++l) {
    if (words > max_words / d) {
      throw SizeCapError(std::string(op) + ": d^N exceeds the word cap of " + std::to_string(max_words));
    }
    words *= d;
  }
  if (words > max_words)
    throw SizeCapError(std::string(op) + ": d^N exceeds the word cap of " + std::to_string(max_words));
  return words;
}

void decode_word(std::size_t flat, std::size_t d, std::vector<std::size_t>& word) {
  for (std::size_t p = word.size(); p-- > 0;) {
    word[p] = flat % d;
    flat /= d;
  }
}

// sqrt(m) * pi^T * prod_l M_l * e, with e = (1/sqrt m) * ones.
template <class StepMatrix>
Complex sandwich(std::span<const double> pi, std::size_t m, std::size_t n_sites, StepMatrix&& step) {
  std::vector<Complex> row(pi.begin(), pi.end());
  std::vector<Complex> next(m);
  for (std::size_t l = 1; l <= n_sites; ++l) {
    const Matrix x = step(l);
    std::fill(next.begin(), next.end(), Complex{});
    for (std::size_t i = 0; i < m; ++i) {
      if (row[i] == Complex{}) continue;
      for (std::size_t j = 0; j < m; ++j) next[j] += row[i] * x(i, j);
    }
    std::swap(row, next);
  }
  const double root_m = std::sqrt(static_cast<double>(m));
  Complex s{};
  for (const Complex& r : row) s += r * (1.0 / root_m);
  return root_m * s;
}

double trace_of(const Matrix& a) { return trace(a).real(); }

}  // namespace

DensityMatrix::DensityMatrix(Matrix m, std::vector<std::size_t> dims)
    : matrix(std::move(m)), factor_dims(std::move(dims)), trace_value(trace_of(matrix)) {}

DensityMatrix mps_density(const SiteTensorSet& t, std::size_t n_sites, std::size_t max_words) {
  checked_words(t.d, n_sites, max_words, "mps_density");
  const TensorVector psi = build_state(t, n_sites);
  Matrix rho = outer(psi);
  rho *= 1.0 / static_cast<double>(t.m);
  return DensityMatrix(std::move(rho), std::vector<std::size_t>(n_sites, t.d));
}

DensityMatrix observation_density_formula(const SiteTensorSet& t, std::span<const double> pi, std::size_t n_sites,
                                          std::size_t max_words) {
  t.check_shapes();
  t.require_sites(n_sites);
  if (pi.size() != t.m) throw DimensionError("observation_density_formula: pi length != m");
  const std::size_t words = checked_words(t.d, n_sites, max_words, "observation_density_formula");

  // Schur products A_k . conj(A_k') per site and symbol pair.
  std::vector<std::vector<Matrix>> blocks(n_sites);
  for (std::size_t l = 1; l <= n_sites; ++l) {
    const auto& fam = t.family(l);
    blocks[l - 1].reserve(t.d * t.d);
    for (std::size_t k = 0; k < t.d; ++k)
      for (std::size_t kp = 0; kp < t.d; ++kp) blocks[l - 1].push_back(schur(fam[k], conjugate(fam[kp])));
  }

  Matrix rho(words, words);
  std::vector<std::size_t> w(n_sites), wp(n_sites);
  for (std::size_t a = 0; a < words; ++a) {
    decode_word(a, t.d, w);
    for (std::size_t b = 0; b < words; ++b) {
      decode_word(b, t.d, wp);
      rho(a, b) = sandwich(pi, t.m, n_sites,
                           [&](std::size_t l) { return blocks[l - 1][w[l - 1] * t.d + wp[l - 1]]; });
    }
  }
  return DensityMatrix(std::move(rho), std::vector<std::size_t>(n_sites, t.d));
}

DensityMatrix observation_density_trace(const EhmmModel& model, std::size_t n_sites, std::size_t max_words,
                                        std::size_t cap) {
  checked_words(model.d, n_sites, max_words, "observation_density_trace");
  const TensorVector psi = build_psi_hon(model, n_sites, cap);
  std::vector<std::size_t> keep(n_sites);
  std::iota(keep.begin(), keep.end(), n_sites + 1);
  return DensityMatrix(reduced_density(psi, keep), std::vector<std::size_t>(n_sites, model.d));
}

DensityMatrix diagonal_channel(const DensityMatrix& rho) {
  if (!rho.matrix.square()) throw DimensionError("diagonal_channel: matrix not square");
  const std::size_t n = rho.matrix.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = rho.matrix(i, i);
  return DensityMatrix(std::move(out), rho.factor_dims);
}

double relative_entropy(const Matrix& rho, const Matrix& sigma, double eps) {
  if (!rho.square() || rho.rows() != sigma.rows() || !sigma.square())
    throw DimensionError("relative_entropy: shape mismatch");
  const HermitianSpectrum r = hermitian_eig(rho);
  const HermitianSpectrum s = hermitian_eig(sigma);
  if (r.eigenvalues.back() < -eps || s.eigenvalues.back() < -eps) {
    std::ostringstream os;
    os << "relative_entropy: input not positive semidefinite (min eigenvalues " << r.eigenvalues.back() << ", "
       << s.eigenvalues.back() << ")";
    throw NumericalError(os.str());
  }
  const std::size_t n = rho.rows();

  double rho_log_rho = 0.0;
  double rho_log_sigma = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double lambda = r.eigenvalues[a];
    if (lambda <= eps) continue;
    rho_log_rho += lambda * std::log(lambda);
    double null_overlap = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      Complex ov{};
      for (std::size_t i = 0; i < n; ++i) ov += std::conj(s.eigenvectors(i, b)) * r.eigenvectors(i, a);
      const double w = std::norm(ov);
      const double mu = s.eigenvalues[b];
      if (mu > eps)
        rho_log_sigma += lambda * w * std::log(mu);
      else
        null_overlap += w;
    }
    if (null_overlap > eps) return std::numeric_limits<double>::infinity();
  }
  return rho_log_rho - rho_log_sigma;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, double eps) {
  return relative_entropy(rho.matrix, sigma.matrix, eps);
}

BoundRhs bound_rhs(const SiteTensorSet& t, std::span<const double> pi, std::size_t n_sites, std::size_t max_words) {
  t.check_shapes();
  t.require_sites(n_sites);
  if (pi.size() != t.m) throw DimensionError("bound_rhs: pi length != m");
  const std::size_t words = checked_words(t.d, n_sites, max_words, "bound_rhs");
  const double m = static_cast<double>(t.m);

  std::vector<std::vector<Matrix>> moduli(n_sites);  // |A_k|^2 entrywise
  for (std::size_t l = 1; l <= n_sites; ++l)
    for (const Matrix& a : t.family(l)) moduli[l - 1].push_back(schur(a, conjugate(a)));

  BoundRhs out;
  double sum = 0.0;
  std::vector<std::size_t> w(n_sites);
  for (std::size_t flat = 0; flat < words; ++flat) {
    decode_word(flat, t.d, w);
    const double num = std::norm(coefficient(t, w));
    if (num == 0.0) continue;
    // pi^dagger (prod |A|^2) e with e = (1/sqrt m) ones; sandwich() carries an extra sqrt(m).
    const double pe = sandwich(pi, t.m, n_sites, [&](std::size_t l) { return moduli[l - 1][w[l - 1]]; }).real() /
                      std::sqrt(m);
    const double den = std::pow(m, 1.5) * pe;
    if (!(den > 0.0)) {
      out.infinite = true;
      ++out.infinite_words;
      continue;
    }
    sum += num * std::log(num / den);
  }
  out.value = out.infinite ? std::numeric_limits<double>::infinity() : sum / m;
  return out;
}

BoundReport check_bound(const EhmmModel& model, std::size_t n_sites, double eps, std::size_t max_words) {
  BoundReport rep;
  rep.n_sites = n_sites;
  const SiteTensorSet t = product_tensors(model);
  rep.gauge_deviation = gauge_check(t).max_deviation();
  if (rep.gauge_deviation > kDefaultGaugeTol) {
    std::ostringstream os;
    os << "tensors a = U chi miss the gauge condition (deviation " << rep.gauge_deviation
       << "); hidden matrices are not all unitary";
    rep.diagnostics.push_back(os.str());
  }

  const DensityMatrix rho_n = mps_density(t, n_sites, max_words);
  const DensityMatrix rho_o = observation_density_trace(model, n_sites, max_words);
  rep.trace_rho_n = rho_n.trace_value;
  rep.trace_rho_o = rho_o.trace_value;
  rep.trace_normalized = std::abs(rep.trace_rho_n - 1.0) <= kBoundSlack;
  if (!rep.trace_normalized) {
    std::ostringstream os;
    os << "Tr rho_N = " << rep.trace_rho_n << " (not 1); literal and renormalised results both reported";
    rep.diagnostics.push_back(os.str());
  }

  rep.s_value = relative_entropy(rho_n, rho_o, eps);
  const BoundRhs rhs = bound_rhs(t, model.pi, n_sites, max_words);
  rep.rhs_value = rhs.value;
  rep.rhs_infinite = rhs.infinite;
  if (rhs.infinite)
    rep.diagnostics.push_back("bound_rhs: " + std::to_string(rhs.infinite_words) +
                              " word(s) with nonzero numerator over zero denominator");
  rep.s_diag = relative_entropy(diagonal_channel(rho_n), diagonal_channel(rho_o), eps);

  if (std::isinf(rep.s_value)) {
    rep.support_violation = true;
    rep.diagnostics.push_back("supp(rho_N) not contained in supp(rho_O;N): S = +inf, bound holds trivially");
  }
  rep.rhs_identity_gap =
      (std::isinf(rep.rhs_value) && std::isinf(rep.s_diag)) ? 0.0 : std::abs(rep.rhs_value - rep.s_diag);
  rep.holds = std::isinf(rep.s_value) ||
              (rep.s_value >= rep.rhs_value - kBoundSlack && rep.s_diag <= rep.s_value + kBoundSlack);

  if (rep.trace_rho_n > 0.0) {
    DensityMatrix unit = rho_n;
    unit.matrix *= 1.0 / rep.trace_rho_n;
    unit.trace_value = 1.0;
    rep.s_value_normalized = relative_entropy(unit, rho_o, eps);
    rep.s_diag_normalized = relative_entropy(diagonal_channel(unit), diagonal_channel(rho_o), eps);
    rep.holds_normalized =
        std::isinf(rep.s_value_normalized) || rep.s_diag_normalized <= rep.s_value_normalized + kBoundSlack;
  } else {
    rep.diagnostics.push_back("rho_N is zero; renormalised comparison skipped");
  }
  return rep;
}

}  // namespace mpsehmm
