#pragma once

// Density matrices of the MPS and of the EHMM observation marginal, the
// dephasing channel, quantum relative entropy and the diagonal lower bound
// on S(rho_N || rho_{O;N}).

#include <cstddef>
#include <string>
#include <vector>

#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/linalg.hpp"
#include "mpsehmm/mps.hpp"

namespace mpsehmm {

struct DensityMatrix {
  Matrix matrix;
  std::vector<std::size_t> factor_dims;
  double trace_value = 0.0;  // recorded, never forced to 1

  DensityMatrix() = default;
  DensityMatrix(Matrix m, std::vector<std::size_t> dims);
};

/// Default cap on the number of observation words d^N for the entropy routines
/// (N <= 6 for d = 2, N <= 4 for d = 3).
inline constexpr std::size_t kDefaultMaxWords = 81;

/// rho_N = (1/m) |psi_N><psi_N|, literally.
[[nodiscard]] DensityMatrix mps_density(const SiteTensorSet& t, std::size_t n_sites,
                                        std::size_t max_words = kDefaultMaxWords);

/// Transfer-matrix formula for the observation marginal: entry (w, w') =
/// sqrt(m) pi^dagger (A_{k1} . conj(A_{k'1})) ... (A_{kN} . conj(A_{k'N})) e with
/// e = (1/sqrt m) sum_j e_j, summed over both words independently.
[[nodiscard]] DensityMatrix observation_density_formula(const SiteTensorSet& t, std::span<const double> pi,
                                                        std::size_t n_sites,
                                                        std::size_t max_words = kDefaultMaxWords);

/// Tr_{H^(N+1)} |Psi_{H,O;N}><Psi_{H,O;N}|.
[[nodiscard]] DensityMatrix observation_density_trace(const EhmmModel& model, std::size_t n_sites,
                                                      std::size_t max_words = kDefaultMaxWords,
                                                      std::size_t cap = kDefaultStateCap);

/// Zeroes the off-diagonal entries.
[[nodiscard]] DensityMatrix diagonal_channel(const DensityMatrix& rho);

/// Tr rho log rho - Tr rho log sigma (natural log, logs on support), or +inf
/// when rho's support is not contained in sigma's. Inputs need not have unit trace.
/// Throws NumericalError when an input has an eigenvalue below -eps.
[[nodiscard]] double relative_entropy(const Matrix& rho, const Matrix& sigma, double eps = kDefaultSupportEps);
[[nodiscard]] double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                      double eps = kDefaultSupportEps);

struct BoundRhs {
  double value = 0.0;
  bool infinite = false;  // some word had a nonzero numerator over a zero denominator
  std::size_t infinite_words = 0;
};

/// (1/m) sum_w |Tr A_w|^2 log(|Tr A_w|^2 / (m^{3/2} pi^dagger (prod |A_{k_l}|^2_.) e)),
/// with 0 log 0 = 0.
[[nodiscard]] BoundRhs bound_rhs(const SiteTensorSet& t, std::span<const double> pi, std::size_t n_sites,
                                 std::size_t max_words = kDefaultMaxWords);

struct BoundReport {
  std::size_t n_sites = 0;
  // Literal rho_N = (1/m)|psi><psi|.
  double s_value = 0.0;     // S(rho_N || rho_{O;N})
  double rhs_value = 0.0;   // bound_rhs
  bool rhs_infinite = false;
  double s_diag = 0.0;      // S(Phi rho_N || Phi rho_{O;N})
  bool holds = false;       // s_value >= rhs_value - 1e-8 and s_diag <= s_value + 1e-8
  double rhs_identity_gap = 0.0;  // |rhs_value - s_diag|
  // rho_N rescaled to unit trace.
  double s_value_normalized = 0.0;
  double s_diag_normalized = 0.0;
  bool holds_normalized = false;  // s_diag_normalized <= s_value_normalized + 1e-8
  // Diagnostics.
  double trace_rho_n = 0.0;
  double trace_rho_o = 0.0;
  bool trace_normalized = false;  // |Tr rho_N - 1| <= 1e-8
  double gauge_deviation = 0.0;
  bool support_violation = false;
  std::vector<std::string> diagnostics;
};

inline constexpr double kBoundSlack = 1e-8;

/// Full pipeline for one model: product tensors a = U chi, rho_N, rho_{O;N} via
/// the partial trace, S, the right-hand side and S of the diagonal projections.
[[nodiscard]] BoundReport check_bound(const EhmmModel& model, std::size_t n_sites, double eps = kDefaultSupportEps,
                                      std::size_t max_words = kDefaultMaxWords);

}  // namespace mpsehmm
