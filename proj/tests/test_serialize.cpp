#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "mpsehmm/catalog.hpp"
#include "mpsehmm/serialize.hpp"

using namespace mpsehmm;

namespace {

void expect_same_model(const EhmmModel& a, const EhmmModel& b) {
  EXPECT_EQ(a.m, b.m);
  EXPECT_EQ(a.d, b.d);
  EXPECT_EQ(a.pi, b.pi);
  EXPECT_EQ(a.repeat_last, b.repeat_last);
  ASSERT_EQ(a.hidden.size(), b.hidden.size());
  for (std::size_t s = 0; s < a.hidden.size(); ++s) {
    EXPECT_EQ(a.hidden[s].entries, b.hidden[s].entries);
    EXPECT_EQ(a.hidden[s].unitary, b.hidden[s].unitary);
    EXPECT_EQ(a.emission[s], b.emission[s]);
  }
}

void expect_same_tensors(const SiteTensorSet& a, const SiteTensorSet& b) {
  EXPECT_EQ(a.m, b.m);
  EXPECT_EQ(a.d, b.d);
  EXPECT_EQ(a.repeat_last, b.repeat_last);
  ASSERT_EQ(a.sites.size(), b.sites.size());
  for (std::size_t s = 0; s < a.sites.size(); ++s)
    for (std::size_t k = 0; k < a.d; ++k) EXPECT_EQ(a.sites[s][k], b.sites[s][k]);
}

class TempDir {
 public:
  TempDir()
      : path_(std::filesystem::temp_directory_path() /
              ("mpsehmm_ser_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(Complex, PairsAndBareNumbers) {
  EXPECT_EQ(complex_to_json(Complex(1.5, -0.25)), Json::parse("[1.5, -0.25]"));
  EXPECT_EQ(complex_from_json(Json::parse("[0.1, 0.2]")), Complex(0.1, 0.2));
  EXPECT_EQ(complex_from_json(Json(3.0)), Complex(3.0));
  EXPECT_THROW((void)complex_from_json(Json::parse("[1, 2, 3]")), SerializationError);
}

TEST(Matrix, RaggedRowsAreRejected) {
  EXPECT_THROW((void)matrix_from_json(Json::parse("[[1, 2], [3]]")), SerializationError);
  EXPECT_THROW((void)matrix_from_json(Json::array()), SerializationError);
}

TEST(RoundTrip, CatalogModelsAndTensorsAreBitExact) {
  const double angle = 1.234567890123;
  for (const auto& info : catalog::list()) {
    const CatalogEntry e =
        info.requires_params ? catalog::get(info.name, std::span<const double>(&angle, 1)) : catalog::get(info.name);
    expect_same_tensors(tensors_from_json(Json::parse(tensors_to_json(*e.tensors).dump())), *e.tensors);
    if (e.model) expect_same_model(model_from_json(Json::parse(model_to_json(*e.model).dump())), *e.model);
  }
}

TEST(RoundTrip, RandomModelsThroughFiles) {
  TempDir dir;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const EhmmModel m = random_model(3, 2, 3, seed);
    const SiteTensorSet t = tensors_from_ehmm(m);
    const auto mp = dir.path() / "m.json";
    const auto tp = dir.path() / "t.json";
    write_json_file(mp, model_to_json(m));
    write_json_file(tp, tensors_to_json(t));
    expect_same_model(model_from_json(read_json_file(mp)), m);
    expect_same_tensors(tensors_from_json(read_json_file(tp)), t);
  }
}

TEST(Schema, VersionAndKindAreChecked) {
  Json j = model_to_json(catalog::get("ghz").model.value());
  Json missing = j;
  missing.erase("schema_version");
  EXPECT_THROW((void)model_from_json(missing), SerializationError);
  Json future = j;
  future["schema_version"] = 2;
  EXPECT_THROW((void)model_from_json(future), SerializationError);
  EXPECT_THROW((void)tensors_from_json(j), SerializationError);
  Json broken = j;
  broken["sites"][0].erase("U");
  EXPECT_THROW((void)model_from_json(broken), SerializationError);
}

TEST(Schema, TranslationInvariantImpliesRepeatLast) {
  Json j = tensors_to_json(*catalog::get("cluster").tensors);
  j.erase("repeat_last");
  EXPECT_TRUE(tensors_from_json(j).repeat_last);
  j["repeat_last"] = false;
  EXPECT_FALSE(tensors_from_json(j).repeat_last);
  Json two = tensors_to_json(tensors_from_ehmm(random_model(2, 2, 2, 4)));
  two["translation_invariant"] = true;
  EXPECT_THROW((void)tensors_from_json(two), SerializationError);
}

TEST(Files, MissingAndMalformed) {
  TempDir dir;
  EXPECT_THROW((void)read_json_file(dir.path() / "absent.json"), SerializationError);
  const auto bad = dir.path() / "bad.json";
  {
    std::ofstream(bad) << "{ not json";
  }
  EXPECT_THROW((void)read_json_file(bad), SerializationError);
}

TEST(Reals, InfinitiesAsStrings) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(real_to_json(inf), Json("inf"));
  EXPECT_EQ(real_to_json(-inf), Json("-inf"));
  EXPECT_EQ(real_from_json(Json("inf")), inf);
  EXPECT_TRUE(std::isnan(real_from_json(real_to_json(std::nan("")))));
  EXPECT_EQ(real_from_json(Json(0.1)), 0.1);
  EXPECT_THROW((void)real_from_json(Json("big")), SerializationError);

  BoundReport r;
  r.s_value = inf;
  r.rhs_value = inf;
  r.rhs_infinite = true;
  const Json j = Json::parse(bound_report_to_json(r).dump());
  EXPECT_EQ(j.at("s_value"), "inf");
  EXPECT_EQ(j.at("rhs_value"), "inf");
  EXPECT_EQ(j.at("kind"), "bound_report");
}

TEST(Reports, DecompositionCarriesWitness) {
  const Json bad = decomposition_to_json(decompose_tensors(*catalog::get("aklt").tensors));
  EXPECT_FALSE(bad.at("feasible").get<bool>());
  EXPECT_EQ(bad.at("witness").at("site"), 1);
  EXPECT_EQ(bad.at("witness").at("hidden_index"), 1);
  EXPECT_NEAR(bad.at("witness").at("sigma2").get<double>(), 1.0 / std::sqrt(3.0), 1e-12);

  const Json good = decomposition_to_json(decompose_tensors(*catalog::get("cluster").tensors));
  EXPECT_TRUE(good.at("feasible").get<bool>());
  EXPECT_FALSE(good.contains("witness"));
  EXPECT_EQ(good.at("sites").size(), 1u);
}

TEST(Reports, StateAndExtracted) {
  const Json s = state_to_json(build_state(*catalog::get("cluster").tensors, 3));
  EXPECT_EQ(s.at("entries").size(), 8u);
  EXPECT_NEAR(s.at("norm").get<double>(), 1.0, 1e-14);
  const Json h = extracted_to_json(extract_classical_hmm(*catalog::get("aklt").tensors));
  EXPECT_EQ(h.at("kind"), "classical_hmm");
  EXPECT_EQ(h.at("sites").size(), 1u);
}
