#include "mpsehmm/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mpsehmm {

namespace {

SiteTensorSet assemble_products(const EhmmModel& model) {
  if (model.hidden.size() != model.emission.size() || model.hidden.empty())
    throw DimensionError("tensors_from_ehmm: hidden and emission lists must be non-empty and equal in length");
  SiteTensorSet t;
  t.m = model.m;
  t.d = model.d;
  t.repeat_last = model.repeat_last;
  for (std::size_t s = 0; s < model.hidden.size(); ++s) {
    const Matrix& u = model.hidden[s].entries;
    const Matrix& chi = model.emission[s];
    if (u.rows() != model.m || u.cols() != model.m || chi.rows() != model.m || chi.cols() != model.d)
      throw DimensionError("tensors_from_ehmm: site " + std::to_string(s + 1) + " has wrong shapes");
    std::vector<Matrix> fam(model.d, Matrix(model.m, model.m));
    for (std::size_t k = 0; k < model.d; ++k)
      for (std::size_t i = 0; i < model.m; ++i)
        for (std::size_t j = 0; j < model.m; ++j) fam[k](i, j) = u(i, j) * chi(i, k);
    t.sites.push_back(std::move(fam));
  }
  return t;
}

void require_gauge(const SiteTensorSet& t, double tol, const char* op) {
  const GaugeReport g = gauge_check(t, tol);
  if (!g.all_pass()) {
    std::ostringstream os;
    os << op << ": gauge condition fails (max deviation " << g.max_deviation() << " > " << tol << ")";
    throw GaugeError(os.str());
  }
}

}  // namespace

SiteTensorSet tensors_from_ehmm(const EhmmModel& model, double unitary_tol) {
  for (std::size_t s = 0; s < model.hidden.size(); ++s) {
    const Matrix& u = model.hidden[s].entries;
    if (!u.square() || unitarity_defect(u) > unitary_tol) {
      std::ostringstream os;
      os << "tensors_from_ehmm: hidden matrix at site " << s + 1 << " is not unitary";
      if (u.square()) os << " (||U^dagger U - I||_F = " << unitarity_defect(u) << ")";
      throw NumericalError(os.str());
    }
  }
  return assemble_products(model);
}

SiteTensorSet product_tensors(const EhmmModel& model) { return assemble_products(model); }

TensorVector build_e_vector(const EhmmModel& model, std::size_t n_obs, std::size_t n, std::size_t cap) {
  if (n_obs == 0) throw std::invalid_argument("build_e_vector: N must be positive");
  if (n < n_obs) throw std::invalid_argument("build_e_vector: n must be >= N");
  model.require_sites(n);
  if (model.pi.size() != model.m) throw DimensionError("build_e_vector: pi has wrong length");
  for (std::size_t i = 0; i < model.pi.size(); ++i) {
    if (!(model.pi[i] > 0.0)) {
      throw std::domain_error("build_e_vector: pi component " + std::to_string(i + 1) +
                              " is zero; E_{N,n} divides by sqrt(pi_i1)");
    }
  }
  const std::size_t m = model.m;
  const std::size_t d = model.d;
  const std::size_t tail = n - n_obs;
  checked_state_size({{m, n + 1}, {d, tail}}, cap);
  const std::size_t obs_size = checked_state_size({{d, tail}}, cap);

  std::vector<std::size_t> dims(n + 1, m);
  dims.insert(dims.end(), tail, d);
  TensorVector e(std::move(dims));

  const std::size_t hidden_size = e.size() / obs_size;
  std::vector<std::size_t> h(n + 1);
  std::vector<Complex> obs;
  for (std::size_t flat = 0; flat < hidden_size; ++flat) {
    std::size_t rest = flat;
    for (std::size_t p = n + 1; p-- > 0;) {
      h[p] = rest % m;
      rest /= m;
    }
    if (h[n_obs] != h[0]) continue;  // delta_{i_{N+1}, i_1}
    Complex amp = 1.0 / std::sqrt(model.pi[h[0]]);
    for (std::size_t l = n_obs + 1; l <= n; ++l) amp *= model.hidden_at(l).entries(h[l - 1], h[l]);
    if (amp == Complex{}) continue;
    obs.assign(1, Complex{1.0});
    for (std::size_t l = n_obs + 1; l <= n; ++l) {
      const Matrix& chi = model.emission_at(l);
      std::vector<Complex> next(obs.size() * d);
      for (std::size_t a = 0; a < obs.size(); ++a)
        for (std::size_t k = 0; k < d; ++k) next[a * d + k] = obs[a] * chi(h[l - 1], k);
      obs = std::move(next);
    }
    for (std::size_t k = 0; k < obs_size; ++k) e[flat * obs_size + k] = amp * obs[k];
  }
  return e;
}

TensorVector observed_mps(const EhmmModel& model, std::size_t n_obs, std::size_t n, std::size_t cap) {
  const TensorVector e = build_e_vector(model, n_obs, n, cap);
  const TensorVector psi = build_psi_hon(model, n, cap);
  // [H_1..H_{n+1}, K_1..K_n] -> [H_1..H_{n+1}, K_{N+1}..K_n, K_1..K_N]
  std::vector<std::size_t> perm(n + 1);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t l = n_obs + 1; l <= n; ++l) perm.push_back(n + l);
  for (std::size_t l = 1; l <= n_obs; ++l) perm.push_back(n + l);
  return partial_inner_product(permute_factors(psi, perm), e, (n + 1) + (n - n_obs));
}

ExtractedHmm extract_classical_hmm(const SiteTensorSet& t, double tol) {
  require_gauge(t, tol, "extract_classical_hmm");
  ExtractedHmm out;
  out.repeat_last = t.repeat_last;
  for (const auto& fam : t.sites) {
    StochasticMatrix pi{t.m, t.m, std::vector<double>(t.m * t.m, 0.0)};
    StochasticMatrix q{t.m, t.d, std::vector<double>(t.m * t.d, 0.0)};
    for (std::size_t k = 0; k < t.d; ++k)
      for (std::size_t i = 0; i < t.m; ++i)
        for (std::size_t j = 0; j < t.m; ++j) {
          const double w = std::norm(fam[k](i, j));
          pi(i, j) += w;
          q(i, k) += w;
        }
    out.transition.push_back(std::move(pi));
    out.emission.push_back(std::move(q));
  }
  return out;
}

EhmmModel isometries_from_mps(const SiteTensorSet& t, std::optional<std::vector<double>> pi, double tol) {
  const ExtractedHmm hmm = extract_classical_hmm(t, tol);
  EhmmModel model;
  model.m = t.m;
  model.d = t.d;
  model.repeat_last = t.repeat_last;
  model.pi = pi ? std::move(*pi) : std::vector<double>(t.m, 1.0 / static_cast<double>(t.m));
  auto root = [](const StochasticMatrix& s) {
    Matrix r(s.rows, s.cols);
    for (std::size_t i = 0; i < s.rows; ++i)
      for (std::size_t j = 0; j < s.cols; ++j) r(i, j) = std::sqrt(std::max(0.0, s(i, j)));
    return r;
  };
  for (std::size_t s = 0; s < hmm.transition.size(); ++s) {
    model.hidden.emplace_back(root(hmm.transition[s]));
    model.emission.push_back(root(hmm.emission[s]));
  }
  return model;
}

const char* to_string(InfeasibilityReason r) {
  switch (r) {
    case InfeasibilityReason::kNone: return "none";
    case InfeasibilityReason::kRankAboveOne: return "rank_above_one";
    case InfeasibilityReason::kZeroSlice: return "zero_slice";
    case InfeasibilityReason::kNonUnitary: return "non_unitary";
  }
  return "unknown";
}

DecompositionResult decompose_tensors(const SiteTensorSet& t, double tol, double gauge_tol) {
  require_gauge(t, gauge_tol, "decompose_tensors");
  const std::size_t m = t.m;
  const std::size_t d = t.d;

  DecompositionResult result;
  result.repeat_last = t.repeat_last;
  std::vector<Matrix> us;
  std::vector<Matrix> chis;
  double worst = 0.0;

  for (std::size_t s = 0; s < t.sites.size(); ++s) {
    const auto& fam = t.sites[s];
    Matrix u(m, m);
    Matrix chi(m, d);
    for (std::size_t i = 0; i < m; ++i) {
      Matrix slice(m, d);  // (j, k) -> a_{k;ij}
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < d; ++k) slice(j, k) = fam[k](i, j);
      const double norm = frobenius_norm(slice);
      if (norm <= tol) {
        result.witness = DecompositionWitness{s + 1, i + 1, 0.0, InfeasibilityReason::kZeroSlice};
        return result;
      }

      // Dominant right singular vector v of the slice, then the spectral norm of
      // the remainder slice - (slice v) v^dagger is the second singular value.
      const HermitianSpectrum gram = hermitian_eig(dagger(slice) * slice);
      Matrix v(d, 1);
      for (std::size_t k = 0; k < d; ++k) v(k, 0) = gram.eigenvectors(k, 0);
      const Matrix left = slice * v;  // m x 1
      const Matrix remainder = slice - left * dagger(v);
      const double sigma2 =
          std::sqrt(std::max(0.0, hermitian_eig(dagger(remainder) * remainder).eigenvalues.front()));
      if (sigma2 > tol * norm) {
        result.witness = DecompositionWitness{s + 1, i + 1, sigma2, InfeasibilityReason::kRankAboveOne};
        return result;
      }

      // chi_i(k) = conj(v_k) e^{-i phi}, U_ij = (slice v)_j e^{i phi}, with phi
      // chosen so that the first nonzero chi entry is real and nonnegative.
      Complex phase = 1.0;
      for (std::size_t k = 0; k < d; ++k) {
        const Complex c = std::conj(v(k, 0));
        if (std::abs(c) > tol) {
          phase = c / std::abs(c);
          break;
        }
      }
      for (std::size_t k = 0; k < d; ++k) chi(i, k) = std::conj(v(k, 0)) / phase;
      for (std::size_t j = 0; j < m; ++j) u(i, j) = left(j, 0) * phase;
    }

    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(fam[k](i, j) - u(i, j) * chi(i, k)));

    if (unitarity_defect(u) > tol) {
      const Matrix overlap = u * dagger(u);
      std::size_t bad = 0;
      for (bool found = false; bad < m && !found;) {
        for (std::size_t j = 0; j < m && !found; ++j)
          found = std::abs(overlap(bad, j) - (bad == j ? 1.0 : 0.0)) > tol;
        if (!found) ++bad;
      }
      bad = std::min(bad, m - 1);
      result.witness = DecompositionWitness{s + 1, bad + 1, 0.0, InfeasibilityReason::kNonUnitary};
      return result;
    }
    us.push_back(std::move(u));
    chis.push_back(std::move(chi));
  }

  result.feasible = true;
  result.u = std::move(us);
  result.chi = std::move(chis);
  result.reconstruction_error = worst;
  return result;
}

EhmmModel model_from_decomposition(const DecompositionResult& r, std::size_t m, std::size_t d,
                                   std::vector<double> pi) {
  if (!r.feasible) throw std::invalid_argument("model_from_decomposition: decomposition is infeasible");
  EhmmModel model;
  model.m = m;
  model.d = d;
  model.pi = std::move(pi);
  model.repeat_last = r.repeat_last;
  for (const Matrix& u : r.u) model.hidden.emplace_back(u);
  model.emission = r.chi;
  return model;
}

}  // namespace mpsehmm
