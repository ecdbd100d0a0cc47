#include "mpsehmm/catalog.hpp"

#include <cmath>
#include <numbers>

#include "mpsehmm/random.hpp"

namespace mpsehmm {

namespace {

const double kRt2 = std::numbers::sqrt2;
const double kInvRt2 = 1.0 / std::numbers::sqrt2;

SiteTensorSet invariant_tensors(std::size_t m, std::size_t d, std::vector<Matrix> family) {
  SiteTensorSet t;
  t.m = m;
  t.d = d;
  t.sites.push_back(std::move(family));
  t.repeat_last = true;
  return t;
}

EhmmModel invariant_model(std::vector<double> pi, Matrix u, Matrix chi) {
  EhmmModel model;
  model.m = u.rows();
  model.d = chi.cols();
  model.pi = std::move(pi);
  model.hidden.emplace_back(std::move(u));
  model.emission.push_back(std::move(chi));
  model.repeat_last = true;
  return model;
}

void require_no_params(const std::string& name, std::span<const double> params) {
  if (!params.empty()) throw CatalogError("catalog entry '" + name + "' takes no parameters");
}

CatalogEntry ghz() {
  CatalogEntry e;
  e.name = "ghz";
  const Matrix p0{{1.0, 0.0}, {0.0, 0.0}};
  const Matrix p1{{0.0, 0.0}, {0.0, 1.0}};
  e.tensors = invariant_tensors(2, 2, {p0, p1});
  e.model = invariant_model({0.5, 0.5}, Matrix::identity(2), Matrix::identity(2));
  e.parameters = {{"state_prefactor", kInvRt2}};
  e.notes =
      "Projectors A_0 = e0 e0^T, A_1 = e1 e1^T at every site; |GHZ>_N = state_prefactor * psi_N. "
      "Scaling site 1 by 1/sqrt2 instead would break the gauge condition there. "
      "Model: pi = (1/2, 1/2), U = I, chi = I.";
  return e;
}

CatalogEntry cluster() {
  CatalogEntry e;
  e.name = "cluster";
  const Matrix a0{{kInvRt2, kInvRt2}, {0.0, 0.0}};
  const Matrix a1{{0.0, 0.0}, {kInvRt2, -kInvRt2}};
  e.tensors = invariant_tensors(2, 2, {a0, a1});
  const Matrix hadamard{{kInvRt2, kInvRt2}, {kInvRt2, -kInvRt2}};
  e.model = invariant_model({0.5, 0.5}, hadamard, Matrix::identity(2));
  e.notes =
      "A_0 = (1/sqrt2)[[1,1],[0,0]], A_1 = (1/sqrt2)[[0,0],[1,-1]]; model U = Hadamard, chi = I, uniform pi. "
      "U = (1/sqrt2)[[1,1],[-1,1]] would give A_1 = (1/sqrt2)[[0,0],[-1,1]] instead.";
  return e;
}

CatalogEntry aklt() {
  CatalogEntry e;
  e.name = "aklt";
  const double r23 = std::sqrt(2.0 / 3.0);
  const double r13 = std::sqrt(1.0 / 3.0);
  const Matrix plus{{0.0, r23}, {0.0, 0.0}};
  const Matrix zero{{r13, 0.0}, {0.0, -r13}};
  const Matrix minus{{0.0, 0.0}, {-r23, 0.0}};
  e.tensors = invariant_tensors(2, 3, {plus, zero, minus});
  e.notes =
      "A_+ = sqrt(2/3) sigma+, A_0 = sqrt(1/3) sigma_z, A_- = -sqrt(2/3) sigma-; symbols ordered (+, 0, -). "
      "No U chi decomposition exists.";
  return e;
}

CatalogEntry aklt_derived() {
  CatalogEntry e;
  e.name = "aklt-derived";
  const double third = 1.0 / 3.0;
  const Matrix plus{{kRt2 * third, 2.0 * third}, {0.0, 0.0}};
  const Matrix zero{{third, kRt2 * third}, {-kRt2 * third, third}};
  const Matrix minus{{0.0, 0.0}, {2.0 * third, -kRt2 * third}};
  e.tensors = invariant_tensors(2, 3, {plus, zero, minus});
  const double r23 = std::sqrt(2.0 / 3.0);
  const double r13 = std::sqrt(1.0 / 3.0);
  const Matrix u{{r13, r23}, {-r23, r13}};
  const Matrix chi{{r23, r13, 0.0}, {0.0, r13, -r23}};
  e.model = invariant_model({0.5, 0.5}, u, chi);
  e.notes =
      "Orthogonal U and chi with |U|^2 and |chi|^2 equal to the AKLT classical HMM (Pi, Q); "
      "tensors a'_{k;ij} = U_ij chi_i(k) as displayed, uniform pi.";
  return e;
}

CatalogEntry theta(std::span<const double> angles) {
  if (angles.empty()) throw CatalogError("catalog entry 'theta' requires at least one angle");
  CatalogEntry e;
  e.name = "theta";
  SiteTensorSet t;
  t.m = 2;
  t.d = 2;
  t.repeat_last = angles.size() == 1;
  EhmmModel model;
  model.m = 2;
  model.d = 2;
  model.pi = {0.5, 0.5};
  model.repeat_last = t.repeat_last;
  for (std::size_t n = 0; n < angles.size(); ++n) {
    const double th = angles[n];
    if (!std::isfinite(th)) throw CatalogError("catalog entry 'theta': angle " + std::to_string(n + 1) + " not finite");
    const double c = std::cos(th);
    const double s = std::sin(th);
    t.sites.push_back({Matrix{{c, 0.0}, {0.0, 1.0}}, Matrix{{0.0, s}, {0.0, 0.0}}});
    const double ac = std::abs(c);
    const double as = std::abs(s);
    model.hidden.emplace_back(Matrix{{ac, as}, {0.0, 1.0}});
    model.emission.push_back(Matrix{{ac, as}, {1.0, 0.0}});
    e.parameters.emplace_back("theta_" + std::to_string(n + 1), th);
  }
  e.tensors = std::move(t);
  e.model = std::move(model);
  e.notes =
      "A_1 = [[cos t, 0], [0, 1]], A_2 = [[0, sin t], [0, 0]] per site. The model holds the square-root "
      "isometries U = [[|cos t|, |sin t|], [0, 1]], chi = [[|cos t|, |sin t|], [1, 0]] with uniform pi; "
      "U is not unitary unless sin t = 0.";
  return e;
}

}  // namespace

namespace catalog {

CatalogEntry get(const std::string& name, std::span<const double> params) {
  if (name == "theta") return theta(params);
  require_no_params(name, params);
  if (name == "ghz") return ghz();
  if (name == "cluster") return cluster();
  if (name == "aklt") return aklt();
  if (name == "aklt-derived") return aklt_derived();
  throw CatalogError("unknown catalog entry '" + name + "'");
}

std::vector<CatalogInfo> list() {
  return {
      {"ghz", "ghz", false, true, true},
      {"cluster", "cluster", false, true, true},
      {"aklt", "aklt", false, true, false},
      {"aklt-derived", "aklt-derived", false, true, true},
      {"theta", "theta(theta_1[, theta_2, ...])", true, true, true},
  };
}

}  // namespace catalog

EhmmModel random_model(std::size_t m, std::size_t d, std::size_t sites, std::uint64_t seed) {
  if (m == 0 || d == 0 || sites == 0) throw std::invalid_argument("random_model: m, d and sites must be positive");
  SplitMix64 rng(seed);
  auto simplex = [&rng](std::size_t n) {
    std::vector<double> x(n);
    double total = 0.0;
    for (double& v : x) total += (v = -std::log(rng.uniform_open_zero()));
    for (double& v : x) v /= total;
    return x;
  };

  EhmmModel model;
  model.m = m;
  model.d = d;
  model.pi = simplex(m);
  for (std::size_t s = 0; s < sites; ++s) {
    Matrix g(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double re = rng.normal();
        g(i, j) = Complex(re, rng.normal());
      }
    // Modified Gram-Schmidt on the columns.
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t p = 0; p < j; ++p) {
        Complex proj{};
        for (std::size_t i = 0; i < m; ++i) proj += std::conj(g(i, p)) * g(i, j);
        for (std::size_t i = 0; i < m; ++i) g(i, j) -= proj * g(i, p);
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < m; ++i) nrm += std::norm(g(i, j));
      nrm = std::sqrt(nrm);
      for (std::size_t i = 0; i < m; ++i) g(i, j) /= nrm;
    }
    model.hidden.emplace_back(std::move(g));

    Matrix chi(m, d);
    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<double> q = simplex(d);
      for (std::size_t k = 0; k < d; ++k)
        chi(i, k) = std::polar(std::sqrt(q[k]), 2.0 * std::numbers::pi * rng.uniform());
    }
    model.emission.push_back(std::move(chi));
  }
  return model;
}

Matrix random_density_matrix(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("random_density_matrix: dim must be positive");
  SplitMix64 rng(seed);
  Matrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double re = rng.normal();
      g(i, j) = Complex(re, rng.normal());
    }
  Matrix rho = g * dagger(g);
  // Exact Hermitian symmetrisation keeps the Jacobi precondition tight.
  for (std::size_t i = 0; i < dim; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < dim; ++j) rho(j, i) = std::conj(rho(i, j));
  }
  rho *= 1.0 / trace(rho).real();
  return rho;
}

}  // namespace mpsehmm
