#pragma once

// Entangled hidden Markov models: model data, validation, the explicit
// isometries V_H / V_O and the finite-volume state vectors.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mpsehmm/linalg.hpp"

namespace mpsehmm {

/// Default cap on dense state entries (2^22).
inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 22;

/// Thrown when a dense object would exceed the configured entry cap.
class SizeCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Row-stochastic real matrix (transition Pi or emission Q).
struct StochasticMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major

  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  /// Largest |row sum - 1|.
  [[nodiscard]] double row_sum_defect() const;
  [[nodiscard]] double min_entry() const;
};

/// Hidden amplitude matrix U together with its (derived) unitarity flag.
struct AmplitudeMatrix {
  Matrix entries;
  bool unitary = false;

  AmplitudeMatrix() = default;
  /// Sets the flag when ||U^dagger U - I||_F <= tol.
  explicit AmplitudeMatrix(Matrix u, double tol = 1e-10);
};

/// Per-site model data. Sites are numbered from 1. With repeat_last the final
/// stored pair is reused for every later site (a single pair = translation invariant).
struct EhmmModel {
  std::size_t m = 0;
  std::size_t d = 0;
  std::vector<double> pi;
  std::vector<AmplitudeMatrix> hidden;
  std::vector<Matrix> emission;  // m x d, entry (i, k) = chi_i(k)
  bool repeat_last = false;

  [[nodiscard]] bool translation_invariant() const { return repeat_last && hidden.size() == 1; }
  /// Number of usable sites, or SIZE_MAX when the last pair repeats.
  [[nodiscard]] std::size_t site_count() const;
  [[nodiscard]] const AmplitudeMatrix& hidden_at(std::size_t site) const;
  [[nodiscard]] const Matrix& emission_at(std::size_t site) const;
  /// Throws std::out_of_range unless sites 1..n exist.
  void require_sites(std::size_t n) const;
};

struct Violation {
  std::string location;  // e.g. "pi", "hidden[2] row 1"
  std::string message;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  [[nodiscard]] bool valid() const { return violations.empty(); }
  [[nodiscard]] std::string to_string() const;
};

/// Lists every violated invariant; never throws for well-shaped or ill-shaped data.
[[nodiscard]] ValidationReport validate(const EhmmModel& model);

struct StochasticProjections {
  std::vector<StochasticMatrix> transition;  // Pi^[n]_{ij} = |U^[n]_{ij}|^2
  std::vector<StochasticMatrix> emission;    // Q^[n]_i(k) = |chi^[n]_i(k)|^2
};

/// One pair per stored site.
[[nodiscard]] StochasticProjections stochastic_projections(const EhmmModel& model);

/// Entrywise squared modulus.
[[nodiscard]] StochasticMatrix squared_moduli(const Matrix& a);

/// V_H as an (m*m) x m matrix: V_H e_i = sum_j U_ij e_i (x) e_j.
[[nodiscard]] Matrix hidden_isometry_matrix(const Matrix& u);
/// V_O as an (m*d) x m matrix: V_O e_i = sum_k chi_i(k) e_i (x) |k>.
[[nodiscard]] Matrix emission_isometry_matrix(const Matrix& chi);

/// V_H^dagger (x (x) x2) V_H evaluated through the closed-form double sum.
[[nodiscard]] Matrix transition_expectation(const Matrix& u, const Matrix& x, const Matrix& x2);
/// V_O^dagger (x (x) y) V_O evaluated through the closed-form double sum.
[[nodiscard]] Matrix emission_expectation(const Matrix& chi, const Matrix& x, const Matrix& y);

/// Psi_{H,O;n} over H^{(n+1)} (x) K^{n}, factors ordered [H_1..H_{n+1}, K_1..K_n].
[[nodiscard]] TensorVector build_psi_hon(const EhmmModel& model, std::size_t n,
                                         std::size_t cap = kDefaultStateCap);
/// Psi_{H;n} over H^{(n+1)}.
[[nodiscard]] TensorVector build_psi_hn(const EhmmModel& model, std::size_t n,
                                        std::size_t cap = kDefaultStateCap);

/// The printed observation-process formula carries n-1 transition factors but
/// labels them Pi^[1] ... Pi^[n]. The two consistent readings:
enum class ObservationIndexing {
  kLeading,   // Pi^[l] on the pair (i_l, i_{l+1}), l = 1..n-1
  kTrailing,  // Pi^[l+1] on the pair (i_l, i_{l+1}), l = 1..n-1 (last factor is Pi^[n])
};

/// Psi_{O;n} from the closed formula sum pi_{i1} Pi..Pi chi_{i1}(k1)..chi_{in}(kn).
/// Not normalised in general.
[[nodiscard]] TensorVector build_psi_on(const EhmmModel& model, std::size_t n,
                                        ObservationIndexing indexing = ObservationIndexing::kLeading,
                                        std::size_t cap = kDefaultStateCap);

/// Psi_{O;n} as the partial inner product <Psi_{H,O;n} | Psi_{H;n}> over the hidden block.
[[nodiscard]] TensorVector observation_by_contraction(const EhmmModel& model, std::size_t n,
                                                      std::size_t cap = kDefaultStateCap);

/// Product of dim^power over the given pairs; throws SizeCapError above cap.
std::size_t checked_state_size(std::initializer_list<std::pair<std::size_t, std::size_t>> dim_powers,
                               std::size_t cap);

}  // namespace mpsehmm
