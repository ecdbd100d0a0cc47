#include "mpsehmm/mps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mpsehmm {

std::size_t SiteTensorSet::site_count() const {
  if (repeat_last && !sites.empty()) return std::numeric_limits<std::size_t>::max();
  return sites.size();
}

const std::vector<Matrix>& SiteTensorSet::family(std::size_t site) const {
  if (site == 0) throw std::out_of_range("SiteTensorSet: sites are numbered from 1");
  if (site <= sites.size()) return sites[site - 1];
  if (repeat_last && !sites.empty()) return sites.back();
  throw std::out_of_range("SiteTensorSet: no tensors for site " + std::to_string(site));
}

void SiteTensorSet::require_sites(std::size_t n) const {
  if (n > site_count()) {
    std::ostringstream os;
    os << "tensor set provides " << site_count() << " sites, " << n << " requested";
    throw std::out_of_range(os.str());
  }
}

void SiteTensorSet::check_shapes() const {
  if (m == 0 || d == 0) throw DimensionError("SiteTensorSet: m and d must be positive");
  if (sites.empty()) throw DimensionError("SiteTensorSet: no sites");
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (sites[s].size() != d) {
      throw DimensionError("SiteTensorSet: site " + std::to_string(s + 1) + " has " +
                           std::to_string(sites[s].size()) + " matrices, expected d = " + std::to_string(d));
    }
    for (const Matrix& a : sites[s])
      if (a.rows() != m || a.cols() != m)
        throw DimensionError("SiteTensorSet: site " + std::to_string(s + 1) + " matrix is not m x m");
  }
}

bool GaugeReport::all_pass() const {
  return std::all_of(pass.begin(), pass.end(), [](bool p) { return p; });
}

double GaugeReport::max_deviation() const {
  return deviation.empty() ? 0.0 : *std::max_element(deviation.begin(), deviation.end());
}

GaugeReport gauge_check(const SiteTensorSet& t, double tol) {
  t.check_shapes();
  GaugeReport report;
  report.tolerance = tol;
  for (const auto& fam : t.sites) {
    Matrix sum(t.m, t.m);
    for (const Matrix& a : fam) sum += a * dagger(a);
    const double dev = frobenius_norm(sum - Matrix::identity(t.m));
    report.deviation.push_back(dev);
    report.pass.push_back(dev <= tol);
  }
  return report;
}

Complex coefficient(const SiteTensorSet& t, std::span<const std::size_t> word) {
  if (word.empty()) throw std::invalid_argument("coefficient: empty word");
  t.require_sites(word.size());
  Matrix running;
  for (std::size_t l = 0; l < word.size(); ++l) {
    if (word[l] >= t.d) {
      throw std::out_of_range("coefficient: symbol " + std::to_string(word[l]) + " at position " +
                              std::to_string(l + 1) + " out of range for d = " + std::to_string(t.d));
    }
    const Matrix& a = t.family(l + 1).at(word[l]);
    running = l == 0 ? a : running * a;
  }
  return trace(running);
}

TensorVector build_state(const SiteTensorSet& t, std::size_t n_sites, std::size_t cap) {
  if (n_sites == 0) throw std::invalid_argument("build_state: N must be positive");
  t.check_shapes();
  t.require_sites(n_sites);
  checked_state_size({{t.d, n_sites}}, cap);

  // Depth-first over words with cached prefix products: prefix[l] holds
  // A^[1]_{k1} ... A^[l+1]_{k(l+1)}; an odometer step at position p only
  // recomputes prefixes from p on. The final trace closes the periodic boundary.
  const std::size_t n = n_sites;
  std::vector<const std::vector<Matrix>*> fams(n);
  for (std::size_t l = 0; l < n; ++l) fams[l] = &t.family(l + 1);

  TensorVector psi(std::vector<std::size_t>(n, t.d));
  std::vector<std::size_t> word(n, 0);
  std::vector<Matrix> prefix(n);
  std::size_t dirty = 0;
  for (std::size_t flat = 0; flat < psi.size(); ++flat) {
    for (std::size_t l = dirty; l < n; ++l) {
      const Matrix& a = (*fams[l])[word[l]];
      prefix[l] = l == 0 ? a : prefix[l - 1] * a;
    }
    psi[flat] = trace(prefix[n - 1]);
    std::size_t p = n;
    while (p-- > 0) {
      if (++word[p] < t.d) break;
      word[p] = 0;
    }
    dirty = p == static_cast<std::size_t>(-1) ? 0 : p;
  }
  return psi;
}

Matrix transfer_matrix(const std::vector<Matrix>& family) {
  if (family.empty()) throw DimensionError("transfer_matrix: empty family");
  const std::size_t m = family.front().rows();
  Matrix e(m * m, m * m);
  for (const Matrix& a : family) e += kron(a, conjugate(a));
  return e;
}

double state_norm(const SiteTensorSet& t, std::size_t n_sites) {
  if (n_sites == 0) throw std::invalid_argument("state_norm: N must be positive");
  t.check_shapes();
  t.require_sites(n_sites);
  // sum_w |Tr A_w|^2 = Tr prod_n E_n with E_n = sum_k A_k (x) conj(A_k).
  Matrix product = transfer_matrix(t.family(1));
  for (std::size_t l = 2; l <= n_sites; ++l) product = product * transfer_matrix(t.family(l));
  return std::sqrt(std::max(0.0, trace(product).real()));
}

}  // namespace mpsehmm
