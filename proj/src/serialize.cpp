#include "mpsehmm/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace mpsehmm {

namespace {

void require_schema(const Json& j, const char* kind) {
  if (!j.is_object()) throw SerializationError(std::string(kind) + ": document is not an object");
  if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion)
    throw SerializationError(std::string(kind) + ": missing or unsupported schema_version");
  if (j.contains("kind") && j.at("kind") != kind)
    throw SerializationError(std::string("expected kind '") + kind + "', found " + j.at("kind").dump());
}

// translation_invariant implies repeat_last; an explicit repeat_last wins.
bool read_repeat_last(const Json& j, std::size_t stored_sites) {
  const bool ti = j.value("translation_invariant", false);
  if (ti && stored_sites != 1)
    throw SerializationError("translation_invariant requires exactly one stored site");
  return j.contains("repeat_last") ? j.at("repeat_last").get<bool>() : ti;
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw SerializationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw SerializationError("complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(complex_to_json(a(i, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    if (!j.is_array() || j.empty()) throw SerializationError("matrix must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    std::vector<Complex> entries;
    entries.reserve(rows * cols);
    for (const Json& row : j) {
      if (!row.is_array() || row.size() != cols) throw SerializationError("matrix rows have unequal lengths");
      for (const Json& z : row) entries.push_back(complex_from_json(z));
    }
    return Matrix(rows, cols, std::move(entries));
  });
}

Json stochastic_to_json(const StochasticMatrix& s) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < s.rows; ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < s.cols; ++c) row.push_back(s(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json model_to_json(const EhmmModel& model) {
  Json sites = Json::array();
  for (std::size_t s = 0; s < model.hidden.size(); ++s) {
    sites.push_back({{"U", matrix_to_json(model.hidden[s].entries)},
                     {"chi", s < model.emission.size() ? matrix_to_json(model.emission[s]) : Json::array()}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "ehmm_model"},
          {"m", model.m},
          {"d", model.d},
          {"pi", model.pi},
          {"translation_invariant", model.translation_invariant()},
          {"repeat_last", model.repeat_last},
          {"sites", std::move(sites)}};
}

EhmmModel model_from_json(const Json& j) {
  require_schema(j, "ehmm_model");
  return guarded("ehmm_model", [&] {
    EhmmModel model;
    model.m = j.at("m").get<std::size_t>();
    model.d = j.at("d").get<std::size_t>();
    model.pi = j.at("pi").get<std::vector<double>>();
    const Json& sites = j.at("sites");
    for (const Json& site : sites) {
      model.hidden.emplace_back(matrix_from_json(site.at("U")));
      model.emission.push_back(matrix_from_json(site.at("chi")));
    }
    model.repeat_last = read_repeat_last(j, sites.size());
    return model;
  });
}

Json tensors_to_json(const SiteTensorSet& t) {
  Json sites = Json::array();
  for (const auto& fam : t.sites) {
    Json f = Json::array();
    for (const Matrix& a : fam) f.push_back(matrix_to_json(a));
    sites.push_back(std::move(f));
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "tensor_set"},
          {"m", t.m},
          {"d", t.d},
          {"translation_invariant", t.translation_invariant()},
          {"repeat_last", t.repeat_last},
          {"sites", std::move(sites)}};
}

SiteTensorSet tensors_from_json(const Json& j) {
  require_schema(j, "tensor_set");
  return guarded("tensor_set", [&] {
    SiteTensorSet t;
    t.m = j.at("m").get<std::size_t>();
    t.d = j.at("d").get<std::size_t>();
    const Json& sites = j.at("sites");
    for (const Json& fam : sites) {
      std::vector<Matrix> family;
      for (const Json& a : fam) family.push_back(matrix_from_json(a));
      t.sites.push_back(std::move(family));
    }
    t.repeat_last = read_repeat_last(j, sites.size());
    t.check_shapes();
    return t;
  });
}

Json state_to_json(const TensorVector& v) {
  Json entries = Json::array();
  for (const Complex& z : v.data()) entries.push_back(complex_to_json(z));
  return {{"schema_version", kSchemaVersion},
          {"kind", "state"},
          {"factor_dims", v.factor_dims()},
          {"norm", v.norm()},
          {"entries", std::move(entries)}};
}

Json extracted_to_json(const ExtractedHmm& h) {
  Json sites = Json::array();
  for (std::size_t s = 0; s < h.transition.size(); ++s)
    sites.push_back({{"Pi", stochastic_to_json(h.transition[s])}, {"Q", stochastic_to_json(h.emission[s])}});
  return {{"schema_version", kSchemaVersion},
          {"kind", "classical_hmm"},
          {"repeat_last", h.repeat_last},
          {"sites", std::move(sites)}};
}

Json decomposition_to_json(const DecompositionResult& r) {
  Json j = {{"schema_version", kSchemaVersion}, {"kind", "decomposition"}, {"feasible", r.feasible}};
  if (r.feasible) {
    Json sites = Json::array();
    for (std::size_t s = 0; s < r.u.size(); ++s)
      sites.push_back({{"U", matrix_to_json(r.u[s])}, {"chi", matrix_to_json(r.chi[s])}});
    j["sites"] = std::move(sites);
    j["repeat_last"] = r.repeat_last;
    j["reconstruction_error"] = r.reconstruction_error;
  }
  if (r.witness) {
    j["witness"] = {{"site", r.witness->site},
                    {"hidden_index", r.witness->hidden_index},
                    {"sigma2", r.witness->sigma2},
                    {"reason", to_string(r.witness->reason)}};
  }
  return j;
}

Json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "inf") return std::numeric_limits<double>::infinity();
  if (j == "-inf") return -std::numeric_limits<double>::infinity();
  if (j == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw SerializationError("expected a real number, found " + j.dump());
}

Json bound_report_to_json(const BoundReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "bound_report"},
          {"N", r.n_sites},
          {"s_value", real_to_json(r.s_value)},
          {"rhs_value", real_to_json(r.rhs_value)},
          {"rhs_infinite", r.rhs_infinite},
          {"s_diag", real_to_json(r.s_diag)},
          {"holds", r.holds},
          {"rhs_identity_gap", real_to_json(r.rhs_identity_gap)},
          {"s_value_normalized", real_to_json(r.s_value_normalized)},
          {"s_diag_normalized", real_to_json(r.s_diag_normalized)},
          {"holds_normalized", r.holds_normalized},
          {"trace_rho_n", r.trace_rho_n},
          {"trace_rho_o", r.trace_rho_o},
          {"trace_normalized", r.trace_normalized},
          {"gauge_deviation", r.gauge_deviation},
          {"support_violation", r.support_violation},
          {"diagnostics", r.diagnostics}};
}

Json gauge_to_json(const GaugeReport& g) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "gauge_report"},
          {"tolerance", g.tolerance},
          {"deviation", g.deviation},
          {"pass", g.pass},
          {"all_pass", g.all_pass()}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SerializationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw SerializationError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw SerializationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw SerializationError("write failed for " + path.string());
}

}  // namespace mpsehmm
