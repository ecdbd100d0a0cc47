#pragma once

// End-to-end acceptance checks 1-8, shared by `selftest` and the acceptance
// test binary. Each check returns pass/fail plus the measured quantities.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/serialize.hpp"

namespace mpsehmm {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // one line of measured values
  double seconds = 0.0;
  Json metrics;        // structured values for the report file
};

struct NamedModel {
  std::string label;
  EhmmModel model;
};

/// ghz, cluster, aklt-derived, theta(pi/3), and ten seeded random unitary
/// models cycling (m, d) over (2,2), (2,3), (3,2), each with `sites` stored sites.
[[nodiscard]] std::vector<NamedModel> acceptance_models(std::size_t sites = 6);

[[nodiscard]] CriterionResult check_round_trip();          // 1
[[nodiscard]] CriterionResult check_gauge_extraction();    // 2
[[nodiscard]] CriterionResult check_decomposition();       // 3
[[nodiscard]] CriterionResult check_density_oracles();     // 4
[[nodiscard]] CriterionResult check_entropy_bound();       // 5
[[nodiscard]] CriterionResult check_data_processing();     // 6
[[nodiscard]] CriterionResult check_unit_vectors();        // 7
[[nodiscard]] CriterionResult check_distinctness();        // 8

/// Runs 1-8 in order, calling on_result after each. When report is set, writes
/// every result (including the criterion-8 overlap) to that JSON file.
std::vector<CriterionResult> run_acceptance(const std::optional<std::filesystem::path>& report = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

[[nodiscard]] std::string format_result_line(const CriterionResult& r);

}  // namespace mpsehmm
