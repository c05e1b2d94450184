#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cli/config.hpp"
#include "magic/errors.hpp"

using namespace magic;
using namespace magic::cli;
namespace fs = std::filesystem;

namespace {

class ConfigTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv(kCacheEnv);
    file_ = fs::temp_directory_path() /
            ("magic-config-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + ".json");
  }
  void TearDown() override {
    unsetenv(kCacheEnv);
    fs::remove(file_);
  }
  std::string write(const std::string& text) {
    std::ofstream(file_) << text;
    return file_.string();
  }
  fs::path file_;
};

}  // namespace

TEST_F(ConfigTest, DefaultsResolve) {
  const auto cfg = resolve_config({});
  EXPECT_EQ(cfg.at("model").at("N"), 32);
  EXPECT_TRUE(cfg.at("mera").at("nu").is_null());
  const auto c = common_settings(cfg);
  EXPECT_EQ(c.threads, 1);
  EXPECT_TRUE(c.allow_compute);
  const auto d = dmrg_settings(cfg);
  EXPECT_EQ(d.svd_cutoff, 1e-7);
  EXPECT_EQ(d.energy_tol, 1e-7);
  EXPECT_EQ(mera_settings(cfg).m_sq, 0.4);
  EXPECT_EQ(meanfield_settings(cfg, 5).q, 5);
}

TEST_F(ConfigTest, UnknownKeysRejected) {
  Overrides o;
  o.config_file = write(R"({"model": {"N": 16, "theta_typo": 0.1}})");
  EXPECT_THROW(resolve_config(o), ValidationError);
  Overrides s;
  s.sets = {"dmrg.cutof=1e-8"};
  EXPECT_THROW(resolve_config(s), ValidationError);
}

TEST_F(ConfigTest, TypeErrorsRejected) {
  Overrides o;
  o.config_file = write(R"({"model": {"N": "sixteen"}})");
  EXPECT_THROW(resolve_config(o), ValidationError);
  Overrides s;
  s.sets = {"model.N=1.5"};
  EXPECT_THROW(resolve_config(s), ValidationError);
  Overrides bad;
  bad.config_file = write("{not json");
  EXPECT_THROW(resolve_config(bad), ValidationError);
}

TEST_F(ConfigTest, Precedence) {
  Overrides o;
  o.config_file = write(R"({"cache_dir": "from-file", "model": {"N": 16}, "threads": 2})");
  EXPECT_EQ(resolve_config(o).at("cache_dir"), "from-file");
  setenv(kCacheEnv, "from-env", 1);
  EXPECT_EQ(resolve_config(o).at("cache_dir"), "from-env");
  o.sets = {"cache_dir=from-set", "model.N=24"};
  EXPECT_EQ(resolve_config(o).at("cache_dir"), "from-set");
  o.cache_dir = "from-flag";
  o.threads = 3;
  const auto cfg = resolve_config(o);
  EXPECT_EQ(cfg.at("cache_dir"), "from-flag");
  EXPECT_EQ(cfg.at("model").at("N"), 24);
  EXPECT_EQ(cfg.at("threads"), 3);
}

TEST_F(ConfigTest, NullableNuSurvivesFile) {
  Overrides o;
  o.config_file = write(R"({"mera": {"nu": null, "m_sq": 0.5}})");
  const auto cfg = resolve_config(o);
  EXPECT_TRUE(cfg.at("mera").at("nu").is_null());
  EXPECT_EQ(cfg.at("mera").at("m_sq"), 0.5);
  Overrides s;
  s.sets = {"mera.nu=0.8"};
  EXPECT_EQ(mera_settings(resolve_config(s)).nu, 0.8);
}

TEST_F(ConfigTest, GridForms) {
  EXPECT_EQ(read_grid(json::array({0.1, 0.2}), "g"), (std::vector<double>{0.1, 0.2}));
  const auto r = read_grid(json{{"start", 0.0}, {"stop", 1.0}, {"count", 5}}, "g");
  ASSERT_EQ(r.size(), 5u);
  EXPECT_EQ(r[2], 0.5);
  EXPECT_EQ(r[4], 1.0);
  EXPECT_THROW(read_grid(json{{"start", 0.0}, {"stop", 1.0}}, "g"), ValidationError);
  EXPECT_THROW(read_grid(json{{"start", 0.0}, {"stop", 1.0}, {"count", 0}}, "g"), ValidationError);
  EXPECT_EQ(read_int_list(json{{"start", 2}, {"stop", 5}}, "i"), (std::vector<int>{2, 3, 4, 5}));
  EXPECT_THROW(read_int_list(json::array({1, 2.5}), "i"), ValidationError);
  EXPECT_THROW(read_int_list(json{{"start", 5}, {"stop", 2}}, "i"), ValidationError);
}

TEST_F(ConfigTest, GridSchemaRejectsUnknownFields) {
  Overrides o;
  o.config_file = write(R"({"subsystem": {"thetas": {"start": 0, "stop": 1, "step": 0.1}}})");
  EXPECT_THROW(resolve_config(o), ValidationError);
}

TEST_F(ConfigTest, CommonRanges) {
  Overrides o;
  o.threads = 0;
  EXPECT_THROW(common_settings(resolve_config(o)), ValidationError);
  Overrides d;
  d.sets = {"dmrg.svd_cutoff=0"};
  EXPECT_THROW(dmrg_settings(resolve_config(d)), ValidationError);
  Overrides m;
  m.sets = {"mera.m_max=2.0"};
  EXPECT_THROW(mera_settings(resolve_config(m)), ValidationError);
}

TEST_F(ConfigTest, MalformedSet) {
  Overrides o;
  o.sets = {"no-equals-sign"};
  EXPECT_THROW(resolve_config(o), ValidationError);
  o.sets = {"=3"};
  EXPECT_THROW(resolve_config(o), ValidationError);
}
