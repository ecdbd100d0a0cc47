#pragma once

// Named constructions of the worked examples: GHZ, cluster, AKLT, the model
// derived from the AKLT classical HMM, and the two-state theta family. Plus
// seeded random models and density matrices for fuzzing.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/mps.hpp"

namespace mpsehmm {

class CatalogError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CatalogEntry {
  std::string name;
  std::optional<SiteTensorSet> tensors;
  std::optional<EhmmModel> model;
  std::vector<std::pair<std::string, double>> parameters;
  std::string notes;
};

struct CatalogInfo {
  std::string name;
  std::string signature;  // e.g. "theta(theta_1, ..., theta_n)"
  bool requires_params = false;
  bool has_tensors = false;
  bool has_model = false;
};

namespace catalog {

/// Throws CatalogError on an unknown name or invalid parameters. "theta" needs
/// at least one angle; a single angle gives a translation-invariant entry,
/// several give one site per angle. The other entries take no parameters.
[[nodiscard]] CatalogEntry get(const std::string& name, std::span<const double> params = {});

[[nodiscard]] std::vector<CatalogInfo> list();

}  // namespace catalog

/// Per site: U from modified Gram-Schmidt on a complex Gaussian matrix, chi rows
/// sqrt(simplex) with uniform phases; pi from a simplex draw. sites >= 1 stored
/// pairs, repeat_last = false.
[[nodiscard]] EhmmModel random_model(std::size_t m, std::size_t d, std::size_t sites, std::uint64_t seed);

/// G G^dagger / Tr for a complex Gaussian dim x dim matrix G (full rank almost surely).
[[nodiscard]] Matrix random_density_matrix(std::size_t dim, std::uint64_t seed);

}  // namespace mpsehmm
