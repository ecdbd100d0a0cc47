#include "mpsehmm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mpsehmm/bridge.hpp"
#include "mpsehmm/catalog.hpp"
#include "mpsehmm/entropy.hpp"
#include "mpsehmm/mps.hpp"

namespace mpsehmm {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

CriterionResult finish(int id, std::string title, bool pass, std::string detail, const Timer& timer, Json metrics) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.pass = pass;
  r.detail = std::move(detail);
  r.seconds = timer.seconds();
  r.metrics = std::move(metrics);
  return r;
}

double max_abs_diff_stochastic(const StochasticMatrix& a, const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) worst = std::max(worst, std::abs(a(i, j) - b[i][j]));
  return worst;
}

// Entries of Tr_{first factor} for a two-factor split (2, dim/2).
Matrix trace_first_factor(const Matrix& rho) {
  const std::vector<std::size_t> dims{2, rho.rows() / 2};
  const std::vector<std::size_t> keep{1};
  return partial_trace(rho, dims, keep);
}

}  // namespace

std::vector<NamedModel> acceptance_models(std::size_t sites) {
  std::vector<NamedModel> out;
  for (const char* name : {"ghz", "cluster", "aklt-derived"}) out.push_back({name, *catalog::get(name).model});
  const double third_pi = std::numbers::pi / 3.0;
  out.push_back({"theta(pi/3)", *catalog::get("theta", std::span<const double>(&third_pi, 1)).model});
  const std::pair<std::size_t, std::size_t> shapes[] = {{2, 2}, {2, 3}, {3, 2}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto [m, d] = shapes[(seed - 1) % 3];
    out.push_back({fmt::format("random(m={},d={},seed={})", m, d, seed), random_model(m, d, sites, seed)});
  }
  return out;
}

CriterionResult check_round_trip() {
  Timer timer;
  double worst = 0.0;
  double worst_n_spread = 0.0;
  std::string worst_case = "-";
  Json per_model = Json::array();
  for (const auto& [label, model] : acceptance_models()) {
    const SiteTensorSet t = product_tensors(model);
    double model_worst = 0.0;
    for (std::size_t big_n = 1; big_n <= 4; ++big_n) {
      const TensorVector psi = build_state(t, big_n);
      std::optional<TensorVector> first;
      for (std::size_t n = big_n; n <= big_n + 2; ++n) {
        const TensorVector obs = observed_mps(model, big_n, n);
        const double dev = max_abs_diff(obs, psi);
        if (dev > worst) {
          worst = dev;
          worst_case = fmt::format("{} N={} n={}", label, big_n, n);
        }
        model_worst = std::max(model_worst, dev);
        if (first)
          worst_n_spread = std::max(worst_n_spread, max_abs_diff(obs, *first));
        else
          first = obs;
      }
    }
    per_model.push_back({{"model", label}, {"max_deviation", model_worst}});
  }
  const double secs = timer.seconds();
  const bool pass = worst <= 1e-10 && worst_n_spread <= 1e-10 && secs <= 60.0;
  return finish(1, "observed_mps reproduces build_state for N<=4, n in {N,N+1,N+2}", pass,
                fmt::format("max dev {:.3e} ({}), n-spread {:.3e}, {:.2f}s", worst, worst_case, worst_n_spread, secs),
                timer,
                {{"max_deviation", worst}, {"n_spread", worst_n_spread}, {"seconds", secs}, {"models", per_model}});
}

CriterionResult check_gauge_extraction() {
  Timer timer;
  const SiteTensorSet aklt = *catalog::get("aklt").tensors;
  const ExtractedHmm hmm = extract_classical_hmm(aklt);
  const double aklt_pi = max_abs_diff_stochastic(hmm.transition[0], {{1.0 / 3, 2.0 / 3}, {2.0 / 3, 1.0 / 3}});
  const double aklt_q = max_abs_diff_stochastic(hmm.emission[0], {{2.0 / 3, 1.0 / 3, 0.0}, {0.0, 1.0 / 3, 2.0 / 3}});

  double theta_dev = 0.0;
  for (const double th : {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3}) {
    const ExtractedHmm h = extract_classical_hmm(*catalog::get("theta", std::span<const double>(&th, 1)).tensors);
    const double c2 = std::cos(th) * std::cos(th);
    const double s2 = std::sin(th) * std::sin(th);
    theta_dev = std::max(theta_dev, max_abs_diff_stochastic(h.transition[0], {{c2, s2}, {0.0, 1.0}}));
    theta_dev = std::max(theta_dev, max_abs_diff_stochastic(h.emission[0], {{c2, s2}, {1.0, 0.0}}));
  }

  double gauge_worst = 0.0;
  std::string gauge_case = "-";
  const double angles[] = {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3, 0.7};
  std::vector<std::pair<std::string, SiteTensorSet>> sets;
  for (const auto& info : catalog::list()) {
    if (info.requires_params) continue;
    sets.emplace_back(info.name, *catalog::get(info.name).tensors);
  }
  sets.emplace_back("theta(pi/6,pi/4,pi/3,0.7)", *catalog::get("theta", angles).tensors);
  for (const auto& [label, t] : sets) {
    const double dev = gauge_check(t).max_deviation();
    if (dev >= gauge_worst) {
      gauge_worst = dev;
      gauge_case = label;
    }
  }
  const bool pass = aklt_pi <= 1e-15 && aklt_q <= 1e-15 && theta_dev <= 1e-15 && gauge_worst <= 1e-12;
  return finish(2, "classical HMM extraction fixtures and catalog gauge condition", pass,
                fmt::format("aklt Pi {:.1e} Q {:.1e}, theta {:.1e}, max gauge dev {:.1e} ({})", aklt_pi, aklt_q,
                            theta_dev, gauge_worst, gauge_case),
                timer,
                {{"aklt_pi_error", aklt_pi},
                 {"aklt_q_error", aklt_q},
                 {"theta_error", theta_dev},
                 {"max_gauge_deviation", gauge_worst}});
}

CriterionResult check_decomposition() {
  Timer timer;
  const DecompositionResult aklt = decompose_tensors(*catalog::get("aklt").tensors);
  const bool aklt_ok = !aklt.feasible && aklt.witness && aklt.witness->sigma2 > 0.0;

  const DecompositionResult cl = decompose_tensors(*catalog::get("cluster").tensors);
  double modulus_dev = cl.feasible ? 0.0 : 1.0;
  for (const Matrix& u : cl.u)
    for (const Complex& z : u.data()) modulus_dev = std::max(modulus_dev, std::abs(std::abs(z) - 1.0 / std::numbers::sqrt2));
  const bool cluster_ok = cl.feasible && modulus_dev <= 1e-10 && cl.reconstruction_error <= 1e-10;

  std::string witness = "none";
  if (aklt.witness)
    witness = fmt::format("site {}, hidden index {}, sigma2 {:.6f} ({})", aklt.witness->site,
                          aklt.witness->hidden_index, aklt.witness->sigma2, to_string(aklt.witness->reason));
  return finish(3, "aklt is not U chi decomposable; cluster is", aklt_ok && cluster_ok,
                fmt::format("aklt infeasible: {}; cluster feasible={}, ||U|-1/sqrt2| {:.1e}, recon {:.1e}",
                            witness, cl.feasible, modulus_dev, cl.reconstruction_error),
                timer,
                {{"aklt", decomposition_to_json(aklt)},
                 {"cluster_modulus_error", modulus_dev},
                 {"cluster_reconstruction_error", cl.reconstruction_error}});
}

CriterionResult check_density_oracles() {
  Timer timer;
  std::vector<NamedModel> models;
  for (auto& nm : acceptance_models(3))
    if (nm.label.rfind("random", 0) != 0) models.push_back(std::move(nm));
  const std::pair<std::size_t, std::size_t> shapes[] = {{2, 2}, {2, 3}, {3, 2}};
  for (std::uint64_t seed = 101; seed <= 105; ++seed) {
    const auto [m, d] = shapes[(seed - 101) % 3];
    models.push_back({fmt::format("random(m={},d={},seed={})", m, d, seed), random_model(m, d, 3, seed)});
  }
  double worst = 0.0;
  std::string worst_case = "-";
  for (const auto& [label, model] : models) {
    const SiteTensorSet t = product_tensors(model);
    const std::size_t max_n = model.d == 3 ? 2 : 3;
    for (std::size_t big_n = 1; big_n <= max_n; ++big_n) {
      const DensityMatrix f = observation_density_formula(t, model.pi, big_n);
      const DensityMatrix tr = observation_density_trace(model, big_n);
      const double dev = max_abs_diff(f.matrix, tr.matrix);
      if (dev >= worst) {
        worst = dev;
        worst_case = fmt::format("{} N={}", label, big_n);
      }
    }
  }
  return finish(4, "transfer formula for rho_O;N equals the partial trace", worst <= 1e-12,
                fmt::format("max entrywise dev {:.3e} ({}) over {} models", worst, worst_case, models.size()), timer,
                {{"max_deviation", worst}});
}

CriterionResult check_entropy_bound() {
  Timer timer;
  const BoundReport ghz = check_bound(*catalog::get("ghz").model, 3);
  const bool ghz_ok = std::abs(ghz.s_value - std::numbers::ln2) <= 1e-8 && std::abs(ghz.rhs_value) <= 1e-10;

  bool all_hold = true;
  bool all_hold_normalized = true;
  double worst_gap = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t non_unit_trace = 0;
  std::size_t cases = 0;
  std::string failing = "-";
  Json rows = Json::array();
  for (const auto& [label, model] : acceptance_models(3)) {
    for (std::size_t big_n = 1; big_n <= 3; ++big_n) {
      const BoundReport r = check_bound(model, big_n);
      ++cases;
      if (!r.trace_normalized) ++non_unit_trace;
      if (!std::isinf(r.s_value)) min_margin = std::min(min_margin, r.s_value - r.rhs_value);
      worst_gap = std::max(worst_gap, r.rhs_identity_gap);
      if (!r.holds || r.rhs_identity_gap > 1e-10) {
        all_hold = false;
        failing = fmt::format("{} N={}", label, big_n);
      }
      all_hold_normalized = all_hold_normalized && r.holds_normalized;
      Json row = bound_report_to_json(r);
      row["model"] = label;
      rows.push_back(std::move(row));
    }
  }
  const bool pass = ghz_ok && all_hold && all_hold_normalized;
  return finish(5, "entropy lower bound S(rho_N||rho_O;N) >= RHS = S(diag||diag)", pass,
                fmt::format("ghz N=3: S={:.10f} RHS={:.1e}; {} cases, min S-RHS {:.3e}, max |RHS-S_diag| {:.1e}, "
                            "Tr rho_N != 1 in {} cases, first failure {}",
                            ghz.s_value, ghz.rhs_value, cases, min_margin, worst_gap, non_unit_trace, failing),
                timer,
                {{"ghz_s", ghz.s_value},
                 {"ghz_rhs", ghz.rhs_value},
                 {"max_identity_gap", worst_gap},
                 {"non_unit_trace_cases", non_unit_trace},
                 {"reports", rows}});
}

CriterionResult check_data_processing() {
  Timer timer;
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t dim = k < 25 ? 4 : 8;
    const Matrix rho = random_density_matrix(dim, 1000 + 2 * k);
    const Matrix sigma = random_density_matrix(dim, 1001 + 2 * k);
    const double s = relative_entropy(rho, sigma);
    DensityMatrix r(rho, {dim});
    DensityMatrix g(sigma, {dim});
    const double s_diag = relative_entropy(diagonal_channel(r), diagonal_channel(g));
    const double s_part = relative_entropy(trace_first_factor(rho), trace_first_factor(sigma));
    worst = std::max({worst, s_diag - s, s_part - s});
    ++pairs;
  }
  return finish(6, "data processing for diagonal and partial-trace channels", worst <= 1e-8,
                fmt::format("{} pairs, max S(Phi rho||Phi sigma) - S(rho||sigma) = {:.3e}", pairs, worst), timer,
                {{"pairs", pairs}, {"max_excess", worst}});
}

CriterionResult check_unit_vectors() {
  Timer timer;
  double norm_dev = 0.0;
  double contraction_dev = 0.0;
  double trailing_dev = 0.0;
  std::string trailing_case = "-";
  for (const auto& [label, model] : acceptance_models()) {
    for (std::size_t n = 1; n <= 5; ++n) {
      norm_dev = std::max(norm_dev, std::abs(build_psi_hon(model, n).norm() - 1.0));
      const TensorVector by_contraction = observation_by_contraction(model, n);
      contraction_dev =
          std::max(contraction_dev, max_abs_diff(build_psi_on(model, n, ObservationIndexing::kLeading), by_contraction));
      const double t = max_abs_diff(build_psi_on(model, n, ObservationIndexing::kTrailing), by_contraction);
      if (t > trailing_dev) {
        trailing_dev = t;
        trailing_case = fmt::format("{} n={}", label, n);
      }
    }
  }
  const bool pass = norm_dev <= 1e-10 && contraction_dev <= 1e-10;
  return finish(7, "Psi_HO;n is a unit vector and Psi_O;n is its partial inner product with Psi_H;n", pass,
                fmt::format("max | ||Psi|| - 1 | {:.1e}, formula vs contraction {:.1e}; trailing-index reading "
                            "differs by up to {:.3e} ({})",
                            norm_dev, contraction_dev, trailing_dev, trailing_case),
                timer,
                {{"norm_deviation", norm_dev},
                 {"contraction_deviation", contraction_dev},
                 {"trailing_reading_deviation", trailing_dev}});
}

CriterionResult check_distinctness() {
  Timer timer;
  const TensorVector a = build_state(*catalog::get("aklt").tensors, 3);
  const TensorVector b = build_state(*catalog::get("aklt-derived").tensors, 3);
  const double overlap = std::abs(inner(a, b)) / (a.norm() * b.norm());
  return finish(8, "aklt and aklt-derived states at N=3 are not parallel", overlap < 1.0 - 1e-6,
                fmt::format("normalized overlap {:.6e}, norms {:.12f} / {:.12f}", overlap, a.norm(), b.norm()), timer,
                {{"normalized_overlap", overlap}, {"norm_aklt", a.norm()}, {"norm_aklt_derived", b.norm()}});
}

std::vector<CriterionResult> run_acceptance(const std::optional<std::filesystem::path>& report,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  using Check = CriterionResult (*)();
  const Check checks[] = {check_round_trip,     check_gauge_extraction, check_decomposition,
                          check_density_oracles, check_entropy_bound,    check_data_processing,
                          check_unit_vectors,   check_distinctness};
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < std::size(checks); ++i) {
    CriterionResult r;
    try {
      r = checks[i]();
    } catch (const std::exception& e) {
      r.id = static_cast<int>(i + 1);
      r.title = "criterion raised an exception";
      r.detail = e.what();
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  if (report) {
    Json doc = {{"schema_version", kSchemaVersion}, {"kind", "acceptance_report"}};
    Json items = Json::array();
    for (const auto& r : results)
      items.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail},
                       {"seconds", r.seconds}, {"metrics", r.metrics}});
    doc["criteria"] = std::move(items);
    write_json_file(*report, doc);
  }
  return results;
}

std::string format_result_line(const CriterionResult& r) {
  return fmt::format("[{}] criterion {}: {} | {}", r.pass ? "PASS" : "FAIL", r.id, r.title, r.detail);
}

}  // namespace mpsehmm
