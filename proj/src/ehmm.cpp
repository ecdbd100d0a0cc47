#include "mpsehmm/ehmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mpsehmm {

namespace {

constexpr double kPiTol = 1e-12;
constexpr double kRowTol = 1e-10;

std::string site_label(const char* what, std::size_t idx) {
  std::ostringstream os;
  os << what << " site " << idx + 1;
  return os.str();
}

// Row sums of |entries|^2.
std::vector<double> squared_row_sums(const Matrix& a) {
  std::vector<double> sums(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) sums[i] += std::norm(a(i, j));
  return sums;
}

void check_rows(const Matrix& a, const std::string& where, ValidationReport& report) {
  const auto sums = squared_row_sums(a);
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const double dev = std::abs(sums[i] - 1.0);
    if (dev > kRowTol) {
      std::ostringstream os;
      os << "row " << i + 1 << " squared moduli sum = " << sums[i];
      report.violations.push_back({where + " row " + std::to_string(i + 1), os.str(), dev});
    }
  }
}

}  // namespace

double StochasticMatrix::row_sum_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += (*this)(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double StochasticMatrix::min_entry() const {
  return entries.empty() ? 0.0 : *std::min_element(entries.begin(), entries.end());
}

AmplitudeMatrix::AmplitudeMatrix(Matrix u, double tol) : entries(std::move(u)) {
  unitary = entries.square() && unitarity_defect(entries) <= tol;
}

std::size_t EhmmModel::site_count() const {
  if (repeat_last && !hidden.empty()) return std::numeric_limits<std::size_t>::max();
  return std::min(hidden.size(), emission.size());
}

const AmplitudeMatrix& EhmmModel::hidden_at(std::size_t site) const {
  if (site == 0) throw std::out_of_range("EhmmModel: sites are numbered from 1");
  if (site <= hidden.size()) return hidden[site - 1];
  if (repeat_last && !hidden.empty()) return hidden.back();
  throw std::out_of_range("EhmmModel: no hidden matrix for site " + std::to_string(site));
}

const Matrix& EhmmModel::emission_at(std::size_t site) const {
  if (site == 0) throw std::out_of_range("EhmmModel: sites are numbered from 1");
  if (site <= emission.size()) return emission[site - 1];
  if (repeat_last && !emission.empty()) return emission.back();
  throw std::out_of_range("EhmmModel: no emission matrix for site " + std::to_string(site));
}

void EhmmModel::require_sites(std::size_t n) const {
  if (n > site_count()) {
    std::ostringstream os;
    os << "model provides " << site_count() << " sites, " << n << " requested";
    throw std::out_of_range(os.str());
  }
}

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "valid";
  std::ostringstream os;
  for (const auto& v : violations) os << v.location << ": " << v.message << "\n";
  return os.str();
}

ValidationReport validate(const EhmmModel& model) {
  ValidationReport report;
  auto add = [&](std::string loc, std::string msg, double mag) {
    report.violations.push_back({std::move(loc), std::move(msg), mag});
  };

  if (model.m == 0) add("m", "hidden dimension must be positive", 0.0);
  if (model.d == 0) add("d", "observation dimension must be positive", 0.0);

  if (model.pi.size() != model.m) {
    add("pi", "length " + std::to_string(model.pi.size()) + " != m", 0.0);
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < model.pi.size(); ++i) {
      const double p = model.pi[i];
      if (!std::isfinite(p) || p < 0.0) {
        std::ostringstream os;
        os << "entry " << i + 1 << " = " << p << " is negative or non-finite";
        add("pi", os.str(), std::isfinite(p) ? -p : 0.0);
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kPiTol) {
      std::ostringstream os;
      os << "pi sum = " << sum;
      add("pi", os.str(), std::abs(sum - 1.0));
    }
  }

  if (model.hidden.empty()) add("hidden", "no hidden matrices", 0.0);
  if (model.emission.empty()) add("emission", "no emission matrices", 0.0);
  if (model.hidden.size() != model.emission.size()) {
    add("sites", "hidden and emission lists differ in length (" + std::to_string(model.hidden.size()) +
                     " vs " + std::to_string(model.emission.size()) + ")",
        0.0);
  }

  for (std::size_t s = 0; s < model.hidden.size(); ++s) {
    const auto where = site_label("hidden", s);
    const Matrix& u = model.hidden[s].entries;
    if (u.rows() != model.m || u.cols() != model.m) {
      add(where, "shape " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) + " != m x m", 0.0);
      continue;
    }
    check_rows(u, where, report);
    if (model.hidden[s].unitary) {
      const double defect = unitarity_defect(u);
      if (defect > kRowTol) {
        std::ostringstream os;
        os << "flagged unitary but ||U^dagger U - I||_F = " << defect;
        add(where, os.str(), defect);
      }
    }
  }
  for (std::size_t s = 0; s < model.emission.size(); ++s) {
    const auto where = site_label("emission", s);
    const Matrix& chi = model.emission[s];
    if (chi.rows() != model.m || chi.cols() != model.d) {
      add(where, "shape " + std::to_string(chi.rows()) + "x" + std::to_string(chi.cols()) + " != m x d", 0.0);
      continue;
    }
    check_rows(chi, where, report);
  }
  return report;
}

StochasticMatrix squared_moduli(const Matrix& a) {
  StochasticMatrix s{a.rows(), a.cols(), std::vector<double>(a.rows() * a.cols())};
  for (std::size_t k = 0; k < s.entries.size(); ++k) s.entries[k] = std::norm(a.data()[k]);
  return s;
}

StochasticProjections stochastic_projections(const EhmmModel& model) {
  StochasticProjections out;
  for (const auto& u : model.hidden) out.transition.push_back(squared_moduli(u.entries));
  for (const auto& chi : model.emission) out.emission.push_back(squared_moduli(chi));
  return out;
}

Matrix hidden_isometry_matrix(const Matrix& u) {
  if (!u.square()) throw DimensionError("hidden_isometry_matrix: U must be square");
  const std::size_t m = u.rows();
  Matrix v(m * m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) v(i * m + j, i) = u(i, j);
  return v;
}

Matrix emission_isometry_matrix(const Matrix& chi) {
  const std::size_t m = chi.rows();
  const std::size_t d = chi.cols();
  Matrix v(m * d, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < d; ++k) v(i * d + k, i) = chi(i, k);
  return v;
}

namespace {

// sum_{k,l} conj(w_ik) w_jl x_ij y_kl for a weight matrix w (rows index the hidden state).
Matrix weighted_expectation(const Matrix& w, const Matrix& x, const Matrix& y, const char* op) {
  const std::size_t m = w.rows();
  const std::size_t r = w.cols();
  if (x.rows() != m || x.cols() != m || y.rows() != r || y.cols() != r)
    throw DimensionError(std::string(op) + ": observable shape mismatch");
  // (w^* y w^T)_{ij} = sum_{k,l} conj(w_ik) y_kl w_jl
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (x(i, j) == Complex{}) continue;
      Complex s{};
      for (std::size_t k = 0; k < r; ++k) {
        const Complex wik = std::conj(w(i, k));
        if (wik == Complex{}) continue;
        for (std::size_t l = 0; l < r; ++l) s += wik * w(j, l) * y(k, l);
      }
      out(i, j) = s * x(i, j);
    }
  return out;
}

}  // namespace

Matrix transition_expectation(const Matrix& u, const Matrix& x, const Matrix& x2) {
  if (!u.square()) throw DimensionError("transition_expectation: U must be square");
  return weighted_expectation(u, x, x2, "transition_expectation");
}

Matrix emission_expectation(const Matrix& chi, const Matrix& x, const Matrix& y) {
  return weighted_expectation(chi, x, y, "emission_expectation");
}

std::size_t checked_state_size(std::initializer_list<std::pair<std::size_t, std::size_t>> dim_powers,
                               std::size_t cap) {
  std::size_t total = 1;
  for (const auto& [dim, power] : dim_powers) {
    for (std::size_t p = 0; p < power; ++p) {
      if (dim != 0 && total > cap / dim) {
        throw SizeCapError("dense state would exceed the size cap of " + std::to_string(cap) + " entries");
      }
      total *= dim;
    }
  }
  if (total > cap)
    throw SizeCapError("dense state would exceed the size cap of " + std::to_string(cap) + " entries");
  return total;
}

namespace {

void require_positive(std::size_t n, const char* op) {
  if (n == 0) throw std::invalid_argument(std::string(op) + ": n must be positive");
}

// sqrt(pi_{i1}) prod_{l=1..n} U^[l]_{i_l i_{l+1}} over hidden strings of length n+1.
std::vector<Complex> hidden_amplitudes(const EhmmModel& model, std::size_t n) {
  const std::size_t m = model.m;
  std::vector<Complex> amp(m);
  for (std::size_t i = 0; i < m; ++i) amp[i] = std::sqrt(model.pi[i]);
  for (std::size_t l = 1; l <= n; ++l) {
    const Matrix& u = model.hidden_at(l).entries;
    std::vector<Complex> next(amp.size() * m);
    for (std::size_t h = 0; h < amp.size(); ++h) {
      if (amp[h] == Complex{}) continue;
      const std::size_t last = h % m;
      for (std::size_t j = 0; j < m; ++j) next[h * m + j] = amp[h] * u(last, j);
    }
    amp = std::move(next);
  }
  return amp;
}

// Digits of a flat hidden string of length len (leftmost most significant).
void decode(std::size_t flat, std::size_t base, std::vector<std::size_t>& digits) {
  for (std::size_t p = digits.size(); p-- > 0;) {
    digits[p] = flat % base;
    flat /= base;
  }
}

// Writes prod_l chi^[l]_{i_l}(k_l) for all k-strings into out (length d^n).
void emission_product(const EhmmModel& model, std::span<const std::size_t> hidden_string,
                      std::size_t n, std::vector<Complex>& out) {
  const std::size_t d = model.d;
  out.assign(1, Complex{1.0});
  for (std::size_t l = 1; l <= n; ++l) {
    const Matrix& chi = model.emission_at(l);
    const std::size_t i = hidden_string[l - 1];
    std::vector<Complex> next(out.size() * d);
    for (std::size_t a = 0; a < out.size(); ++a)
      for (std::size_t k = 0; k < d; ++k) next[a * d + k] = out[a] * chi(i, k);
    out = std::move(next);
  }
}

}  // namespace

TensorVector build_psi_hon(const EhmmModel& model, std::size_t n, std::size_t cap) {
  require_positive(n, "build_psi_hon");
  model.require_sites(n);
  checked_state_size({{model.m, n + 1}, {model.d, n}}, cap);

  const auto amp = hidden_amplitudes(model, n);
  const std::size_t obs_size = checked_state_size({{model.d, n}}, cap);
  std::vector<std::size_t> dims(n + 1, model.m);
  dims.insert(dims.end(), n, model.d);
  TensorVector psi(std::move(dims));

  std::vector<std::size_t> digits(n + 1);
  std::vector<Complex> obs;
  for (std::size_t h = 0; h < amp.size(); ++h) {
    if (amp[h] == Complex{}) continue;
    decode(h, model.m, digits);
    emission_product(model, digits, n, obs);
    const std::size_t base = h * obs_size;
    for (std::size_t k = 0; k < obs_size; ++k) psi[base + k] = amp[h] * obs[k];
  }
  return psi;
}

TensorVector build_psi_hn(const EhmmModel& model, std::size_t n, std::size_t cap) {
  require_positive(n, "build_psi_hn");
  model.require_sites(n);
  checked_state_size({{model.m, n + 1}}, cap);
  return TensorVector(std::vector<std::size_t>(n + 1, model.m), hidden_amplitudes(model, n));
}

TensorVector build_psi_on(const EhmmModel& model, std::size_t n, ObservationIndexing indexing,
                          std::size_t cap) {
  require_positive(n, "build_psi_on");
  model.require_sites(n);
  const std::size_t obs_size = checked_state_size({{model.d, n}}, cap);
  checked_state_size({{model.m, n}}, cap);
  const std::size_t m = model.m;

  // pi_{i1} prod Pi over hidden strings (i_1..i_n)
  std::vector<double> weight(model.pi.begin(), model.pi.end());
  for (std::size_t l = 1; l + 1 <= n; ++l) {
    const std::size_t site = indexing == ObservationIndexing::kLeading ? l : l + 1;
    const StochasticMatrix pi_l = squared_moduli(model.hidden_at(site).entries);
    std::vector<double> next(weight.size() * m, 0.0);
    for (std::size_t h = 0; h < weight.size(); ++h) {
      if (weight[h] == 0.0) continue;
      const std::size_t last = h % m;
      for (std::size_t j = 0; j < m; ++j) next[h * m + j] = weight[h] * pi_l(last, j);
    }
    weight = std::move(next);
  }

  TensorVector out(std::vector<std::size_t>(n, model.d));
  std::vector<std::size_t> digits(n);
  std::vector<Complex> obs;
  for (std::size_t h = 0; h < weight.size(); ++h) {
    if (weight[h] == 0.0) continue;
    decode(h, m, digits);
    emission_product(model, digits, n, obs);
    for (std::size_t k = 0; k < obs_size; ++k) out[k] += weight[h] * obs[k];
  }
  return out;
}

TensorVector observation_by_contraction(const EhmmModel& model, std::size_t n, std::size_t cap) {
  return partial_inner_product(build_psi_hon(model, n, cap), build_psi_hn(model, n, cap), n + 1);
}

}  // namespace mpsehmm
