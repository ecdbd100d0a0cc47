#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "mpsehmm/bridge.hpp"
#include "mpsehmm/catalog.hpp"
#include "mpsehmm/entropy.hpp"
#include "oracles.hpp"

using namespace mpsehmm;

namespace {

EhmmModel model_of(const char* name) { return *catalog::get(name).model; }

DensityMatrix diag_density(std::vector<double> d) {
  const std::size_t n = d.size();
  return DensityMatrix(Matrix::diagonal(d), {n});
}

// Tr rho (log rho - log sigma) through matrix logarithms; valid for full-rank sigma.
double entropy_oracle(const Matrix& rho, const Matrix& sigma) {
  const Matrix diff = log_on_support(rho) - log_on_support(sigma);
  return trace(oracle::matmul(rho, diff)).real();
}

}  // namespace

TEST(MpsDensity, GhzIsRankOneWithUnitTrace) {
  const DensityMatrix rho = mps_density(*catalog::get("ghz").tensors, 3);
  EXPECT_NEAR(rho.trace_value, 1.0, 1e-15);  // ||psi||^2 = 2, m = 2
  EXPECT_EQ(rho.factor_dims, (std::vector<std::size_t>{2, 2, 2}));
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b) {
      const double expect = ((a == 0 || a == 7) && (b == 0 || b == 7)) ? 0.5 : 0.0;
      EXPECT_NEAR(std::abs(rho.matrix(a, b) - expect), 0.0, 1e-15);
    }
  const HermitianSpectrum s = hermitian_eig(rho.matrix);
  EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[1], 0.0, 1e-14);
}

TEST(MpsDensity, TraceIsRecordedNotForced) {
  const DensityMatrix rho = mps_density(*catalog::get("aklt").tensors, 3);
  EXPECT_NEAR(rho.trace_value, (8.0 / 9.0) / 2.0, 1e-14);
  EXPECT_THROW((void)mps_density(*catalog::get("ghz").tensors, 7), SizeCapError);
}

TEST(ObservationDensity, GhzFormulaAndTraceRoutes) {
  // (1/2)(|00><00| + |11><11|)
  const DensityMatrix f = observation_density_formula(*catalog::get("ghz").tensors, model_of("ghz").pi, 2);
  const DensityMatrix t = observation_density_trace(model_of("ghz"), 2);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const double expect = (a == b && (a == 0 || a == 3)) ? 0.5 : 0.0;
      EXPECT_NEAR(std::abs(f.matrix(a, b) - expect), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(t.matrix(a, b) - expect), 0.0, 1e-15);
    }
}

TEST(ObservationDensity, ScalarCase) {
  SiteTensorSet t;
  t.m = 1;
  t.d = 1;
  t.sites = {{Matrix::identity(1)}};
  t.repeat_last = true;
  const std::vector<double> pi{1.0};
  const DensityMatrix f = observation_density_formula(t, pi, 3);
  ASSERT_EQ(f.matrix.rows(), 1u);
  EXPECT_NEAR(f.matrix(0, 0).real(), 1.0, 1e-15);
}

TEST(ObservationDensity, FormulaEqualsPartialTraceForRandomModels) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const EhmmModel model = random_model(2 + seed % 2, 2 + (seed % 3 == 0), 4, seed);
    const SiteTensorSet t = product_tensors(model);
    const std::size_t max_n = model.d == 3 ? 3 : 4;
    for (std::size_t n = 1; n <= max_n; ++n) {
      const DensityMatrix f = observation_density_formula(t, model.pi, n);
      const DensityMatrix tr = observation_density_trace(model, n);
      EXPECT_LE(oracle::max_diff(f.matrix, tr.matrix), 1e-12) << seed << " " << n;
      EXPECT_NEAR(tr.trace_value, 1.0, 1e-10);
      EXPECT_LE(hermiticity_defect(tr.matrix), 1e-12);
    }
  }
}

TEST(ObservationDensity, ThetaFamilyCrossOracle) {
  const double th = 0.6;
  const EhmmModel model = *catalog::get("theta", std::span<const double>(&th, 1)).model;
  const DensityMatrix f = observation_density_formula(product_tensors(model), model.pi, 3);
  const DensityMatrix tr = observation_density_trace(model, 3);
  EXPECT_LE(oracle::max_diff(f.matrix, tr.matrix), 1e-12);
}

TEST(DiagonalChannel, ZeroesOffDiagonalAndIsIdempotent) {
  const DensityMatrix rho(oracle::random_hermitian(4, 5), {2, 2});
  const DensityMatrix d = diagonal_channel(rho);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(d.matrix(i, j), i == j ? rho.matrix(i, i) : Complex{});
  EXPECT_EQ(diagonal_channel(d).matrix, d.matrix);
  EXPECT_NEAR(d.trace_value, rho.trace_value, 1e-15);
  const DensityMatrix diag = diag_density({0.2, 0.8});
  EXPECT_EQ(diagonal_channel(diag).matrix, diag.matrix);
}

TEST(DiagonalChannel, GhzMpsDensity) {
  const DensityMatrix d = diagonal_channel(mps_density(*catalog::get("ghz").tensors, 3));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(d.matrix(i, i).real(), (i == 0 || i == 7) ? 0.5 : 0.0, 1e-15);
}

TEST(RelativeEntropy, AnalyticTwoLevelCases) {
  const DensityMatrix pure = diag_density({1.0, 0.0});
  const DensityMatrix mixed = diag_density({0.5, 0.5});
  EXPECT_NEAR(relative_entropy(pure, mixed), std::numbers::ln2, 1e-15);
  EXPECT_EQ(relative_entropy(mixed, pure), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(relative_entropy(mixed, mixed), 0.0, 1e-15);
}

TEST(RelativeEntropy, MatchesMatrixLogarithmOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const Matrix rho = random_density_matrix(n, seed);
    const Matrix sigma = random_density_matrix(n, seed + 100);
    const double s = relative_entropy(rho, sigma);
    EXPECT_NEAR(s, entropy_oracle(rho, sigma), 1e-10);
    EXPECT_GE(s, -1e-12);
    EXPECT_NEAR(relative_entropy(rho, rho), 0.0, 1e-10);
  }
}

TEST(RelativeEntropy, SupportViolationForRotatedPureStates) {
  const double r = 1.0 / std::numbers::sqrt2;
  const Matrix plus{{0.5, 0.5}, {0.5, 0.5}};
  const std::vector<double> d{1.0, 0.0};
  EXPECT_TRUE(std::isinf(relative_entropy(plus, Matrix::diagonal(d))));
  const Matrix same{{r * r, r * r}, {r * r, r * r}};
  EXPECT_NEAR(relative_entropy(plus, same), 0.0, 1e-12);
}

TEST(RelativeEntropy, RejectsNonPsdAndShapeMismatch) {
  const std::vector<double> neg{1.5, -0.5};
  const std::vector<double> ok{0.5, 0.5};
  EXPECT_THROW((void)relative_entropy(Matrix::diagonal(neg), Matrix::diagonal(ok)), NumericalError);
  EXPECT_THROW((void)relative_entropy(Matrix::diagonal(ok), Matrix::identity(3)), DimensionError);
}

TEST(RelativeEntropy, DataProcessingForRandomPairs) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t dim = seed % 2 ? 4 : 8;
    const Matrix rho = random_density_matrix(dim, 500 + seed);
    const Matrix sigma = random_density_matrix(dim, 600 + seed);
    const double s = relative_entropy(rho, sigma);
    EXPECT_LE(relative_entropy(diagonal_channel(DensityMatrix(rho, {dim})),
                               diagonal_channel(DensityMatrix(sigma, {dim}))),
              s + 1e-8);
    const std::vector<std::size_t> dims{2, dim / 2};
    for (std::size_t keep_factor : {0u, 1u}) {
      const std::vector<std::size_t> keep{keep_factor};
      EXPECT_LE(relative_entropy(partial_trace(rho, dims, keep), partial_trace(sigma, dims, keep)), s + 1e-8);
    }
  }
}

TEST(BoundRhs, GhzIsZero) {
  const BoundRhs r = bound_rhs(*catalog::get("ghz").tensors, model_of("ghz").pi, 3);
  EXPECT_FALSE(r.infinite);
  EXPECT_NEAR(r.value, 0.0, 1e-15);
}

TEST(BoundRhs, SingleWordHandEvaluation) {
  // d = 1, m = 2, A = I/sqrt2, N = 2: |Tr A^2|^2 = 1, |A|^2 = I/2, pi^T (I/4) e = 1/(4 sqrt2),
  // denominator 2^{3/2} / (4 sqrt2) = 1/2, RHS = (1/2) * 1 * ln 2.
  SiteTensorSet t;
  t.m = 2;
  t.d = 1;
  t.sites = {{Matrix::identity(2) * Complex(1.0 / std::numbers::sqrt2)}};
  t.repeat_last = true;
  const std::vector<double> pi{0.3, 0.7};
  EXPECT_NEAR(bound_rhs(t, pi, 2).value, 0.5 * std::numbers::ln2, 1e-15);
}

TEST(BoundRhs, ZeroDenominatorIsInfinite) {
  SiteTensorSet t = *catalog::get("ghz").tensors;
  const std::vector<double> pi{1.0, 0.0};
  const BoundRhs r = bound_rhs(t, pi, 2);
  EXPECT_TRUE(r.infinite);
  EXPECT_EQ(r.infinite_words, 1u);  // word 11 has Tr = 1 but no weight under pi
}

TEST(BoundRhs, EqualsDiagonalRelativeEntropy) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const EhmmModel model = random_model(2, 2, 3, seed);
    const SiteTensorSet t = product_tensors(model);
    for (std::size_t n = 1; n <= 3; ++n) {
      const double diag = relative_entropy(diagonal_channel(mps_density(t, n)),
                                           diagonal_channel(observation_density_trace(model, n)));
      EXPECT_NEAR(bound_rhs(t, model.pi, n).value, diag, 1e-10);
    }
  }
}

TEST(CheckBound, GhzAtThreeSites) {
  // rho_N is pure with Tr rho log rho = 0; rho_O;N = (1/2)(|000><000| + |111><111|)
  // so -Tr rho_N log rho_O;N = ln 2. The diagonal parts coincide, so RHS = 0.
  const BoundReport r = check_bound(model_of("ghz"), 3);
  EXPECT_NEAR(r.s_value, std::numbers::ln2, 1e-8);
  EXPECT_NEAR(r.rhs_value, 0.0, 1e-10);
  EXPECT_NEAR(r.s_diag, 0.0, 1e-10);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.trace_normalized);
  EXPECT_FALSE(r.support_violation);
}

TEST(CheckBound, ClusterAndThetaHold) {
  const BoundReport c = check_bound(model_of("cluster"), 3);
  EXPECT_TRUE(c.holds);
  EXPECT_GE(c.s_value, c.rhs_value - 1e-8);
  const double th = std::numbers::pi / 4;
  const BoundReport t = check_bound(*catalog::get("theta", std::span<const double>(&th, 1)).model, 2);
  EXPECT_TRUE(t.holds);
  EXPECT_LE(t.s_diag, t.s_value + 1e-8);
  EXPECT_GT(t.gauge_deviation, 1e-3);
  EXPECT_FALSE(t.diagnostics.empty());
}

TEST(CheckBound, LiteralAndRenormalisedBothHoldOnRandomModels) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const EhmmModel model = random_model(2 + seed % 2, 2, 3, seed);
    for (std::size_t n = 1; n <= 3; ++n) {
      const BoundReport r = check_bound(model, n);
      EXPECT_TRUE(r.holds);
      EXPECT_TRUE(r.holds_normalized);
      EXPECT_LE(r.rhs_identity_gap, 1e-10);
      EXPECT_NEAR(r.trace_rho_o, 1.0, 1e-10);
      EXPECT_EQ(r.trace_normalized, std::abs(r.trace_rho_n - 1.0) <= kBoundSlack);
    }
  }
}

TEST(CheckBound, SupportViolationHoldsTrivially) {
  // pi = (1, 0) makes rho_O;N supported on |0..0> only, while rho_N of the GHZ
  // tensors also has weight on |1..1>.
  EhmmModel g = model_of("ghz");
  g.pi = {1.0, 0.0};
  const BoundReport r = check_bound(g, 2);
  EXPECT_TRUE(r.support_violation);
  EXPECT_TRUE(std::isinf(r.s_value));
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.rhs_infinite);
}
