#pragma once

// JSON interchange. Complex numbers are [re, im] pairs, matrices are row-major
// nested arrays, and every top-level document carries schema_version = 1.
// Doubles are written in shortest round-trip form, so export -> import is exact.

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mpsehmm/bridge.hpp"
#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/entropy.hpp"
#include "mpsehmm/mps.hpp"

namespace mpsehmm {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class SerializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] Json complex_to_json(Complex z);
[[nodiscard]] Complex complex_from_json(const Json& j);
[[nodiscard]] Json matrix_to_json(const Matrix& a);
[[nodiscard]] Matrix matrix_from_json(const Json& j);
[[nodiscard]] Json stochastic_to_json(const StochasticMatrix& s);

/// {"schema_version", "kind": "ehmm_model", m, d, pi, translation_invariant,
///  repeat_last, sites: [{U, chi}, ...]}
[[nodiscard]] Json model_to_json(const EhmmModel& model);
[[nodiscard]] EhmmModel model_from_json(const Json& j);

/// {"schema_version", "kind": "tensor_set", m, d, translation_invariant,
///  repeat_last, sites: [[A_0, ..., A_{d-1}], ...]}
[[nodiscard]] Json tensors_to_json(const SiteTensorSet& t);
[[nodiscard]] SiteTensorSet tensors_from_json(const Json& j);

[[nodiscard]] Json state_to_json(const TensorVector& v);
[[nodiscard]] Json extracted_to_json(const ExtractedHmm& h);
[[nodiscard]] Json decomposition_to_json(const DecompositionResult& r);
[[nodiscard]] Json bound_report_to_json(const BoundReport& r);
[[nodiscard]] Json gauge_to_json(const GaugeReport& g);

/// Infinite values are written as the strings "inf" / "-inf"; JSON has no literal for them.
[[nodiscard]] Json real_to_json(double x);
[[nodiscard]] double real_from_json(const Json& j);

/// Throws SerializationError on I/O or parse failure.
[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace mpsehmm
