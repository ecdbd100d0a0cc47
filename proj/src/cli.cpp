#include "mpsehmm/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <optional>
#include <ostream>

#include "mpsehmm/acceptance.hpp"
#include "mpsehmm/bridge.hpp"
#include "mpsehmm/catalog.hpp"
#include "mpsehmm/entropy.hpp"
#include "mpsehmm/serialize.hpp"

namespace mpsehmm::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by a command after it has printed its own result; carries exit code 1.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  double atol = 1e-10;
  double rtol = 1e-10;
  double eps = kDefaultSupportEps;
  std::size_t cap = kDefaultStateCap;
  std::uint64_t seed = 1;
  std::string format = "table";
};

struct Source {
  std::string tensors_file;
  std::string model_file;
  std::string name;
  std::vector<double> params;
  std::size_t m = 2;
  std::size_t d = 2;
  std::size_t sites = 6;
};

std::string real(double x) { return fmt::format("{:.12g}", x); }

std::string cplx(Complex z) {
  if (z.imag() == 0.0) return real(z.real());
  if (z.real() == 0.0) return fmt::format("{:.12g}i", z.imag());
  return fmt::format("{:.12g}{:+.12g}i", z.real(), z.imag());
}

void print_matrix(std::ostream& out, const std::string& label, const Matrix& a) {
  fmt::print(out, "{} =\n", label);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::string line = "  [";
    for (std::size_t j = 0; j < a.cols(); ++j) line += (j ? ", " : "") + cplx(a(i, j));
    fmt::print(out, "{}]\n", line);
  }
}

void print_stochastic(std::ostream& out, const std::string& label, const StochasticMatrix& s) {
  fmt::print(out, "{} =\n", label);
  for (std::size_t i = 0; i < s.rows; ++i) {
    std::string line = "  [";
    for (std::size_t j = 0; j < s.cols; ++j) line += (j ? ", " : "") + real(s(i, j));
    fmt::print(out, "{}]\n", line);
  }
}

std::string multi_index(std::size_t flat, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> idx(dims.size());
  for (std::size_t p = dims.size(); p-- > 0;) {
    idx[p] = flat % dims[p];
    flat /= dims[p];
  }
  std::string s;
  for (std::size_t p = 0; p < idx.size(); ++p) s += (p ? "," : "") + std::to_string(idx[p]);
  return s;
}

void print_state(std::ostream& out, const TensorVector& v, const std::string& index_label) {
  fmt::print(out, "{:<24} {}\n", index_label, "coefficient");
  std::size_t zeros = 0;
  for (std::size_t f = 0; f < v.size(); ++f) {
    if (v[f] == Complex{}) {
      ++zeros;
      continue;
    }
    fmt::print(out, "{:<24} {}\n", multi_index(f, v.factor_dims()), cplx(v[f]));
  }
  fmt::print(out, "({} zero entries omitted)\n", zeros);
  fmt::print(out, "norm   = {}\nnorm^2 = {}\n", real(v.norm()), real(v.norm() * v.norm()));
}

std::size_t cap_from_env() {
  const char* raw = std::getenv(kSizeCapEnv);
  if (raw == nullptr || *raw == '\0') return kDefaultStateCap;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != std::string(raw).size() || v == 0) throw std::invalid_argument(raw);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("{} must be a positive integer, got '{}'", kSizeCapEnv, raw));
  }
}

void add_source(CLI::App* cmd, Source& src, bool tensors_allowed) {
  auto* group = cmd->add_option_group("input", "exactly one input source");
  if (tensors_allowed) group->add_option("--tensors", src.tensors_file, "tensor-set JSON file")->check(CLI::ExistingFile);
  group->add_option("--model", src.model_file, "EHMM model JSON file")->check(CLI::ExistingFile);
  group->add_option("--name", src.name, "catalog entry, or 'random' for a seeded random model");
  group->require_option(1);
  cmd->add_option("--params", src.params, "catalog parameters (theta angles)")->delimiter(',');
  cmd->add_option("--m", src.m, "hidden dimension for --name random")->check(CLI::PositiveNumber);
  cmd->add_option("--d", src.d, "observation dimension for --name random")->check(CLI::PositiveNumber);
  cmd->add_option("--stored-sites", src.sites, "stored sites for --name random")->check(CLI::PositiveNumber);
}

void require_valid(const EhmmModel& model) {
  const ValidationReport rep = validate(model);
  if (!rep.valid()) throw UsageError("invalid model:\n" + rep.to_string());
}

EhmmModel load_model(const Source& src, const Options& opt) {
  EhmmModel model;
  if (!src.model_file.empty()) {
    model = model_from_json(read_json_file(src.model_file));
  } else if (src.name == "random") {
    model = random_model(src.m, src.d, src.sites, opt.seed);
  } else if (!src.name.empty()) {
    CatalogEntry e = catalog::get(src.name, src.params);
    if (!e.model) throw UsageError("catalog entry '" + src.name + "' has no EHMM model");
    model = std::move(*e.model);
  } else {
    throw UsageError("an EHMM model is required (--model or --name)");
  }
  require_valid(model);
  return model;
}

SiteTensorSet load_tensors(const Source& src, const Options& opt) {
  if (!src.tensors_file.empty()) return tensors_from_json(read_json_file(src.tensors_file));
  if (!src.name.empty() && src.name != "random") {
    CatalogEntry e = catalog::get(src.name, src.params);
    if (e.tensors) return std::move(*e.tensors);
  }
  return product_tensors(load_model(src, opt));
}

bool as_json(const Options& opt) { return opt.format == "json"; }

int cmd_catalog_list(const Options& opt, std::ostream& out) {
  const auto infos = catalog::list();
  if (as_json(opt)) {
    Json arr = Json::array();
    for (const auto& i : infos)
      arr.push_back({{"name", i.name},
                     {"signature", i.signature},
                     {"requires_params", i.requires_params},
                     {"tensors", i.has_tensors},
                     {"model", i.has_model}});
    out << arr.dump(2) << '\n';
    return kExitOk;
  }
  fmt::print(out, "{:<14} {:<32} {:<8} {}\n", "name", "signature", "tensors", "model");
  for (const auto& i : infos)
    fmt::print(out, "{:<14} {:<32} {:<8} {}\n", i.name, i.signature, i.has_tensors ? "yes" : "no",
               i.has_model ? "yes" : "no");
  return kExitOk;
}

int cmd_catalog_export(const std::string& name, const std::vector<double>& params, const std::string& dir,
                       std::ostream& out) {
  const CatalogEntry e = catalog::get(name, params);
  std::filesystem::create_directories(dir);
  if (e.tensors) {
    const auto p = std::filesystem::path(dir) / (name + ".tensors.json");
    write_json_file(p, tensors_to_json(*e.tensors));
    fmt::print(out, "wrote {}\n", p.string());
  }
  if (e.model) {
    const auto p = std::filesystem::path(dir) / (name + ".model.json");
    write_json_file(p, model_to_json(*e.model));
    fmt::print(out, "wrote {}\n", p.string());
  }
  for (const auto& [k, v] : e.parameters) fmt::print(out, "parameter {} = {}\n", k, real(v));
  fmt::print(out, "notes: {}\n", e.notes);
  return kExitOk;
}

int cmd_build_mps(const Source& src, std::size_t n_sites, const std::string& out_file, const Options& opt,
                  std::ostream& out) {
  const SiteTensorSet t = load_tensors(src, opt);
  const TensorVector psi = build_state(t, n_sites, opt.cap);
  const GaugeReport g = gauge_check(t);
  if (!out_file.empty()) write_json_file(out_file, state_to_json(psi));
  if (as_json(opt)) {
    Json j = state_to_json(psi);
    j["gauge"] = gauge_to_json(g);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  print_state(out, psi, "word");
  fmt::print(out, "gauge max deviation = {} ({})\n", real(g.max_deviation()), g.all_pass() ? "pass" : "fail");
  return kExitOk;
}

int cmd_build_ehmm_state(const Source& src, std::size_t n, const std::string& which, const std::string& indexing,
                         const std::string& out_file, const Options& opt, std::ostream& out) {
  const EhmmModel model = load_model(src, opt);
  TensorVector v;
  std::string label;
  if (which == "hon") {
    v = build_psi_hon(model, n, opt.cap);
    label = "h_1..h_{n+1},k_1..k_n";
  } else if (which == "hn") {
    v = build_psi_hn(model, n, opt.cap);
    label = "h_1..h_{n+1}";
  } else {
    const auto ix = indexing == "trailing" ? ObservationIndexing::kTrailing : ObservationIndexing::kLeading;
    v = build_psi_on(model, n, ix, opt.cap);
    label = "k_1..k_n";
  }
  if (!out_file.empty()) write_json_file(out_file, state_to_json(v));
  if (as_json(opt)) {
    out << state_to_json(v).dump(2) << '\n';
    return kExitOk;
  }
  print_state(out, v, label);
  return kExitOk;
}

int cmd_verify_theorem1(const Source& src, std::size_t big_n, std::vector<std::size_t> ns, double tol,
                        const Options& opt, std::ostream& out) {
  const EhmmModel model = load_model(src, opt);
  if (ns.empty()) ns = {big_n, big_n + 1, big_n + 2};
  const SiteTensorSet t = product_tensors(model);
  const TensorVector psi = build_state(t, big_n, opt.cap);
  bool ok = true;
  Json rows = Json::array();
  for (const std::size_t n : ns) {
    if (n < big_n) throw UsageError(fmt::format("--n values must be >= N = {}", big_n));
    const double dev = max_abs_diff(observed_mps(model, big_n, n, opt.cap), psi);
    ok = ok && dev <= tol;
    rows.push_back({{"n", n}, {"max_deviation", dev}, {"pass", dev <= tol}});
  }
  const double gauge = gauge_check(t).max_deviation();
  if (as_json(opt)) {
    out << Json{{"schema_version", kSchemaVersion},
                {"kind", "theorem1_verification"},
                {"N", big_n},
                {"tolerance", tol},
                {"gauge_deviation", gauge},
                {"results", rows},
                {"pass", ok}}
               .dump(2)
        << '\n';
  } else {
    fmt::print(out, "N = {}, tolerance = {}, gauge deviation of a = U chi: {}\n", big_n, real(tol), real(gauge));
    fmt::print(out, "{:>4}  {:<20} {}\n", "n", "max |dev|", "result");
    for (const Json& r : rows)
      fmt::print(out, "{:>4}  {:<20} {}\n", r["n"].get<std::size_t>(), real(r["max_deviation"].get<double>()),
                 r["pass"].get<bool>() ? "pass" : "FAIL");
  }
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_extract(const Source& src, double gauge_tol, const Options& opt, std::ostream& out) {
  const SiteTensorSet t = load_tensors(src, opt);
  ExtractedHmm h;
  try {
    h = extract_classical_hmm(t, gauge_tol);
  } catch (const GaugeError& e) {
    throw VerificationFailure(e.what());
  }
  if (as_json(opt)) {
    out << extracted_to_json(h).dump(2) << '\n';
    return kExitOk;
  }
  for (std::size_t s = 0; s < h.transition.size(); ++s) {
    const std::string suffix = h.repeat_last && s + 1 == h.transition.size() ? "+" : "";
    fmt::print(out, "site {}{}\n", s + 1, suffix);
    print_stochastic(out, "Pi", h.transition[s]);
    print_stochastic(out, "Q", h.emission[s]);
  }
  return kExitOk;
}

int cmd_decompose(const Source& src, double tol, double gauge_tol, const Options& opt, std::ostream& out) {
  const SiteTensorSet t = load_tensors(src, opt);
  DecompositionResult r;
  try {
    r = decompose_tensors(t, tol, gauge_tol);
  } catch (const GaugeError& e) {
    throw VerificationFailure(e.what());
  }
  if (as_json(opt)) {
    out << decomposition_to_json(r).dump(2) << '\n';
  } else if (r.feasible) {
    fmt::print(out, "feasible, reconstruction error {}\n", real(r.reconstruction_error));
    for (std::size_t s = 0; s < r.u.size(); ++s) {
      fmt::print(out, "site {}\n", s + 1);
      print_matrix(out, "U", r.u[s]);
      print_matrix(out, "chi", r.chi[s]);
    }
  } else {
    const auto& w = *r.witness;
    fmt::print(out, "infeasible, site {}, hidden index {}\n", w.site, w.hidden_index);
    fmt::print(out, "reason: {}, second singular value {}\n", to_string(w.reason), real(w.sigma2));
  }
  return r.feasible ? kExitOk : kExitVerificationFailed;
}

int cmd_entropy(const Source& src, std::size_t big_n, std::size_t max_words, const Options& opt,
                std::ostream& out) {
  const EhmmModel model = load_model(src, opt);
  const BoundReport r = check_bound(model, big_n, opt.eps, max_words);
  if (as_json(opt)) {
    out << bound_report_to_json(r).dump(2) << '\n';
  } else {
    const auto row = [&](const char* k, const std::string& v) { fmt::print(out, "{:<34} {}\n", k, v); };
    const auto yes = [](bool b) { return std::string(b ? "yes" : "no"); };
    row("N", std::to_string(r.n_sites));
    row("S(rho_N || rho_O;N)", real(r.s_value));
    row("RHS", real(r.rhs_value));
    row("S(Phi rho_N || Phi rho_O;N)", real(r.s_diag));
    row("|RHS - S_diag|", real(r.rhs_identity_gap));
    row("holds", yes(r.holds));
    row("S (rho_N renormalised)", real(r.s_value_normalized));
    row("S_diag (rho_N renormalised)", real(r.s_diag_normalized));
    row("holds (renormalised)", yes(r.holds_normalized));
    row("Tr rho_N", real(r.trace_rho_n));
    row("Tr rho_O;N", real(r.trace_rho_o));
    row("gauge deviation", real(r.gauge_deviation));
    row("support violation", yes(r.support_violation));
    for (const auto& d : r.diagnostics) fmt::print(out, "note: {}\n", d);
  }
  return r.holds ? kExitOk : kExitVerificationFailed;
}

int cmd_selftest(const std::string& report, std::ostream& out) {
  std::optional<std::filesystem::path> path;
  if (!report.empty()) path = report;
  const auto results = run_acceptance(path, [&](const CriterionResult& r) {
    fmt::print(out, "{}\n", format_result_line(r));
    out.flush();
  });
  std::size_t passed = 0;
  double secs = 0.0;
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    secs += r.seconds;
  }
  fmt::print(out, "selftest: {}/{} criteria passed in {:.2f}s\n", passed, results.size(), secs);
  return passed == results.size() ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entangled hidden Markov models and periodic matrix product states"};
  app.fallthrough();
  app.require_subcommand(1);

  Options opt;
  app.add_option("--atol", opt.atol, "absolute tolerance (default check tolerance)")->check(CLI::PositiveNumber);
  app.add_option("--rtol", opt.rtol, "relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eps", opt.eps, "support threshold for relative entropy")->check(CLI::PositiveNumber);
  auto* cap_opt = app.add_option("--cap", opt.cap, "maximum dense entries (default 2^22 or $MPSEHMM_SIZE_CAP)")
                      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "seed for --name random");
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"table", "json"}));

  // catalog
  auto* cat = app.add_subcommand("catalog", "list or export catalog entries");
  cat->require_subcommand(1);
  auto* cat_list = cat->add_subcommand("list", "list entries");
  auto* cat_export = cat->add_subcommand("export", "write <name>.tensors.json / <name>.model.json");
  std::string export_name;
  std::vector<double> export_params;
  std::string export_dir = ".";
  cat_export->add_option("name", export_name, "entry name")->required();
  cat_export->add_option("--params", export_params, "theta angles")->delimiter(',');
  cat_export->add_option("--out-dir", export_dir, "output directory");

  // build-mps
  auto* bmps = app.add_subcommand("build-mps", "coefficients Tr(A_k1 ... A_kN) and the norm");
  Source bmps_src;
  std::size_t bmps_sites = 0;
  std::string bmps_out;
  add_source(bmps, bmps_src, true);
  bmps->add_option("--sites", bmps_sites, "N")->required()->check(CLI::PositiveNumber);
  bmps->add_option("--out", bmps_out, "write the state as JSON");

  // build-ehmm-state
  auto* best = app.add_subcommand("build-ehmm-state", "Psi_{H,O;n}, Psi_{H;n} or Psi_{O;n}");
  Source best_src;
  std::size_t best_n = 0;
  std::string best_which = "hon";
  std::string best_indexing = "leading";
  std::string best_out;
  add_source(best, best_src, false);
  best->add_option("--n", best_n, "n")->required()->check(CLI::PositiveNumber);
  best->add_option("--which", best_which, "hon | hn | on")->check(CLI::IsMember({"hon", "hn", "on"}));
  best->add_option("--indexing", best_indexing, "transition indexing for --which on")
      ->check(CLI::IsMember({"leading", "trailing"}));
  best->add_option("--out", best_out, "write the state as JSON");

  // verify theorem1
  auto* ver = app.add_subcommand("verify", "verification pipelines");
  ver->require_subcommand(1);
  auto* thm = ver->add_subcommand("theorem1", "observed_mps against build_state");
  Source thm_src;
  std::size_t thm_big_n = 0;
  std::vector<std::size_t> thm_ns;
  std::optional<double> thm_tol;
  add_source(thm, thm_src, false);
  thm->add_option("--N", thm_big_n, "observed sites N")->required()->check(CLI::PositiveNumber);
  thm->add_option("--n", thm_ns, "comma-separated n values (default N, N+1, N+2)")->delimiter(',');
  thm->add_option("--tol", thm_tol, "pass threshold (default --atol)");

  // extract
  auto* ext = app.add_subcommand("extract", "classical HMM (Pi', Q') from gauge-satisfying tensors");
  Source ext_src;
  double ext_gauge_tol = kDefaultGaugeTol;
  add_source(ext, ext_src, true);
  ext->add_option("--gauge-tol", ext_gauge_tol, "gauge tolerance")->check(CLI::PositiveNumber);

  // decompose
  auto* dec = app.add_subcommand("decompose", "test a_{k;ij} = U_ij chi_i(k)");
  Source dec_src;
  double dec_tol = 1e-10;
  double dec_gauge_tol = kDefaultGaugeTol;
  add_source(dec, dec_src, true);
  dec->add_option("--tol", dec_tol, "rank-one tolerance")->check(CLI::PositiveNumber);
  dec->add_option("--gauge-tol", dec_gauge_tol, "gauge tolerance")->check(CLI::PositiveNumber);

  // entropy
  auto* ent = app.add_subcommand("entropy", "relative entropy lower bound report");
  Source ent_src;
  std::size_t ent_n = 0;
  std::size_t ent_words = kDefaultMaxWords;
  add_source(ent, ent_src, false);
  ent->add_option("--N", ent_n, "observed sites N")->required()->check(CLI::PositiveNumber);
  ent->add_option("--max-words", ent_words, "cap on d^N")->check(CLI::PositiveNumber);

  // selftest
  auto* st = app.add_subcommand("selftest", "run acceptance criteria 1-8");
  std::string st_report;
  st->add_option("--report", st_report, "write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cap_opt->count() == 0) opt.cap = cap_from_env();
    if (cat_list->parsed()) return cmd_catalog_list(opt, out);
    if (cat_export->parsed()) return cmd_catalog_export(export_name, export_params, export_dir, out);
    if (bmps->parsed()) return cmd_build_mps(bmps_src, bmps_sites, bmps_out, opt, out);
    if (best->parsed()) return cmd_build_ehmm_state(best_src, best_n, best_which, best_indexing, best_out, opt, out);
    if (thm->parsed()) return cmd_verify_theorem1(thm_src, thm_big_n, thm_ns, thm_tol.value_or(opt.atol), opt, out);
    if (ext->parsed()) return cmd_extract(ext_src, ext_gauge_tol, opt, out);
    if (dec->parsed()) return cmd_decompose(dec_src, dec_tol, dec_gauge_tol, opt, out);
    if (ent->parsed()) return cmd_entropy(ent_src, ent_n, ent_words, opt, out);
    if (st->parsed()) return cmd_selftest(st_report, out);
  } catch (const VerificationFailure& e) {
    fmt::print(err, "verification failed: {}\n", e.what());
    return kExitVerificationFailed;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"mpsehmm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mpsehmm::cli
