#pragma once

// The two directions between EHMMs and periodic MPS:
//  * EHMM -> MPS: a_{k;ij} = U_ij chi_i(k), and recovery of psi_N by partial
//    measurement of Psi_{H,O;n} against the vector E_{N,n};
//  * MPS -> EHMM: classical (Pi', Q') extraction and the square-root isometries;
//  * the rank-one feasibility test for writing given tensors as U_ij chi_i(k).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mpsehmm/ehmm.hpp"
#include "mpsehmm/mps.hpp"

namespace mpsehmm {

/// Thrown when an operation requiring the gauge condition receives tensors that fail it.
class GaugeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// a_{k;ij} = U_ij chi_i(k) for every stored site. Requires unitary hidden
/// matrices (the gauge condition depends on it); throws NumericalError otherwise.
[[nodiscard]] SiteTensorSet tensors_from_ehmm(const EhmmModel& model, double unitary_tol = 1e-10);

/// Same product construction without the unitarity requirement.
[[nodiscard]] SiteTensorSet product_tensors(const EhmmModel& model);

/// E_{N,n} over H^{(n+1)} (x) K^{(n-N)}, factors [H_1..H_{n+1}, K_{N+1}..K_n].
/// Requires n >= N >= 1 and every pi_i > 0.
[[nodiscard]] TensorVector build_e_vector(const EhmmModel& model, std::size_t n_obs, std::size_t n,
                                          std::size_t cap = kDefaultStateCap);

/// <Psi_{H,O;n} | E_{N,n}> over the hidden block and the trailing n-N observation factors.
[[nodiscard]] TensorVector observed_mps(const EhmmModel& model, std::size_t n_obs, std::size_t n,
                                        std::size_t cap = kDefaultStateCap);

struct ExtractedHmm {
  std::vector<StochasticMatrix> transition;  // Pi'_{ij} = sum_k |a_{k;ij}|^2
  std::vector<StochasticMatrix> emission;    // Q'_i(k) = sum_j |a_{k;ij}|^2
  bool repeat_last = false;
};

/// Throws GaugeError when gauge_check fails at tol.
[[nodiscard]] ExtractedHmm extract_classical_hmm(const SiteTensorSet& t, double tol = kDefaultGaugeTol);

/// U'_ij = sqrt(Pi'_ij), chi'_i(k) = sqrt(Q'_i(k)) with nonnegative roots. pi
/// defaults to the uniform distribution. Throws GaugeError on gauge failure.
[[nodiscard]] EhmmModel isometries_from_mps(const SiteTensorSet& t, std::optional<std::vector<double>> pi = {},
                                            double tol = kDefaultGaugeTol);

enum class InfeasibilityReason {
  kNone,
  kRankAboveOne,  // second singular value of a slice above tol * ||slice||
  kZeroSlice,     // an all-zero slice would need a zero chi row
  kNonUnitary,    // slices are rank one but the assembled U is not unitary
};

[[nodiscard]] const char* to_string(InfeasibilityReason r);

struct DecompositionWitness {
  std::size_t site = 0;          // 1-based
  std::size_t hidden_index = 0;  // 1-based
  double sigma2 = 0.0;
  InfeasibilityReason reason = InfeasibilityReason::kNone;
};

struct DecompositionResult {
  bool feasible = false;
  std::vector<Matrix> u;    // per stored site, present iff feasible
  std::vector<Matrix> chi;  // per stored site, present iff feasible
  bool repeat_last = false;
  double reconstruction_error = 0.0;  // max |a_{k;ij} - U_ij chi_i(k)|
  std::optional<DecompositionWitness> witness;
};

/// Tests every m x d slice M^(i)_{jk} = a_{k;ij} for rank one. The chi row is
/// the unit-norm right factor with its first nonzero entry real and nonnegative.
/// Throws GaugeError when the tensors fail the gauge condition at gauge_tol.
[[nodiscard]] DecompositionResult decompose_tensors(const SiteTensorSet& t, double tol = 1e-10,
                                                    double gauge_tol = kDefaultGaugeTol);

/// Model (pi, U, chi) rebuilt from a feasible decomposition.
[[nodiscard]] EhmmModel model_from_decomposition(const DecompositionResult& r, std::size_t m, std::size_t d,
                                                 std::vector<double> pi);

}  // namespace mpsehmm
