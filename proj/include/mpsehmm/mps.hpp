#pragma once

// Periodic-boundary matrix product states given by site tensor families {A_k}.

#include <cstddef>
#include <span>
#include <vector>

#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/linalg.hpp"

namespace mpsehmm {

/// Site families A^[n]_k (m x m, k = 0..d-1), sites numbered from 1. With
/// repeat_last the final stored family serves every later site.
struct SiteTensorSet {
  std::size_t m = 0;
  std::size_t d = 0;
  std::vector<std::vector<Matrix>> sites;
  bool repeat_last = false;

  [[nodiscard]] bool translation_invariant() const { return repeat_last && sites.size() == 1; }
  [[nodiscard]] std::size_t site_count() const;
  [[nodiscard]] const std::vector<Matrix>& family(std::size_t site) const;
  void require_sites(std::size_t n) const;
  /// Throws DimensionError unless every family has d matrices of shape m x m.
  void check_shapes() const;
};

struct GaugeReport {
  std::vector<double> deviation;  // ||sum_k A_k A_k^dagger - I||_F per stored site
  std::vector<bool> pass;
  double tolerance = 0.0;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] double max_deviation() const;
};

inline constexpr double kDefaultGaugeTol = 1e-12;

[[nodiscard]] GaugeReport gauge_check(const SiteTensorSet& t, double tol = kDefaultGaugeTol);

/// Tr(A^[1]_{k1} ... A^[N]_{kN}) for word = (k1, ..., kN).
[[nodiscard]] Complex coefficient(const SiteTensorSet& t, std::span<const std::size_t> word);

/// |psi_N> = sum_w coefficient(w) |w>, unnormalised.
[[nodiscard]] TensorVector build_state(const SiteTensorSet& t, std::size_t n_sites,
                                       std::size_t cap = kDefaultStateCap);

/// ||psi_N|| through the product of transfer matrices sum_k A_k (x) conj(A_k),
/// without materialising the state.
[[nodiscard]] double state_norm(const SiteTensorSet& t, std::size_t n_sites);

/// The m^2 x m^2 transfer matrix of one site.
[[nodiscard]] Matrix transfer_matrix(const std::vector<Matrix>& family);

}  // namespace mpsehmm
