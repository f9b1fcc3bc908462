#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "jladder/report.hpp"

using namespace jladder;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("jladder_report_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(RunConfig, Validation) {
  report::RunConfig run;
  EXPECT_NO_THROW(run.validate());
  run.quad_tol = 0.0;
  EXPECT_THROW(run.validate(), Error);
  run = {};
  run.k0 = 0;
  EXPECT_THROW(run.validate(), Error);
}

TEST(RunConfig, FeedsLadderConfig) {
  report::RunConfig run;
  run.quad_tol = 3e-10;
  run.root_tol = 2e-12;
  run.rs_depth = 3;
  const auto cfg = run.ladder_config();
  EXPECT_EQ(cfg.table.quad_tol, 3e-10);
  EXPECT_EQ(cfg.root_tol, 2e-12);
  EXPECT_EQ(cfg.table.zeta.rs_depth, 3);
  EXPECT_FALSE(run.cache_file().has_value());
}

TEST(CacheDir, FlagBeatsEnvironment) {
  ::setenv(report::kCacheEnv, "/tmp/from_env", 1);
  EXPECT_EQ(report::resolve_cache_dir("/tmp/from_flag")->string(), "/tmp/from_flag");
  EXPECT_EQ(report::resolve_cache_dir("")->string(), "/tmp/from_env");
  ::unsetenv(report::kCacheEnv);
  EXPECT_FALSE(report::resolve_cache_dir("").has_value());
}

TEST(Cache, SaveThenReload) {
  const auto dir = scratch("reload");
  report::RunConfig run;
  run.cache_dir = dir;
  {
    auto model = report::open_model(run);
    model->ensure_table(600.0);
    report::save_model(run, *model);
  }
  ASSERT_TRUE(fs::exists(dir / report::kCacheFile));
  EXPECT_FALSE(fs::exists(dir / (std::string(report::kCacheFile) + ".tmp")));
  auto again = report::open_model(run);
  const auto snap = again->snapshot();
  EXPECT_GE(snap.t_end(), 600.0);
  ladder::LadderModel fresh(run.ladder_config());
  EXPECT_NEAR(again->cumulative_hl(450.0), fresh.cumulative_hl(450.0), 1e-9);
  fs::remove_all(dir);
}

TEST(Cache, MismatchedConfigRefused) {
  const auto dir = scratch("mismatch");
  report::RunConfig run;
  run.cache_dir = dir;
  {
    auto model = report::open_model(run);
    model->ensure_table(300.0);
    report::save_model(run, *model);
  }
  run.quad_tol = 1e-9;
  try {
    report::open_model(run);
    FAIL() << "expected ConfigMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigMismatch);
  }
  fs::remove_all(dir);
}

TEST(Json, RunConfigCarriesHash) {
  report::RunConfig run;
  ladder::LadderModel model(run.ladder_config());
  const auto j = report::to_json(run, model);
  EXPECT_EQ(j["config_hash"], model.config().table.hash());
  EXPECT_EQ(j["normalizer"], "HL_STANDARD");
  EXPECT_TRUE(j["cache"].is_null());
  EXPECT_EQ(j["seed"], run.seed);
}

TEST(Json, HybridReportFields) {
  ladder::LadderModel model;
  tower::ChainWorkbench bench(model);
  hybrid::Params p;
  p.L = 200;
  p.U = 1.0;
  p.k1 = 1;
  p.k2 = 2;
  p.delta = hybrid::DeltaPair(Rational(1, 3), Rational(1, 5));
  const auto rep = hybrid::secondary_v1(bench, p);
  const auto j = report::to_json(rep);
  for (const char* key : {"formula_id", "params", "lhs", "rhs", "rel_residual", "tolerance", "pass", "condition",
                          "points", "error_budget", "timings"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["formula_id"], "SECONDARY1_44");
  EXPECT_EQ(j["params"]["delta3"], "1/3");
  EXPECT_TRUE(j["params"]["k3"].is_null());
  EXPECT_EQ(j["lhs"].get<double>(), rep.lhs);
  EXPECT_FALSE(report::to_json(rep, false).contains("timings"));
  const auto& pts = j["points"];
  ASSERT_FALSE(pts.empty());
  for (const auto& d : pts) {
    const int k = d["k"];
    ASSERT_EQ(d["rows"].size(), static_cast<std::size_t>(k + 1));
    for (const auto& row : d["rows"]) {
      EXPECT_GE(row["alpha"].get<double>(), row["segment_lo"].get<double>());
      EXPECT_LE(row["alpha"].get<double>(), row["segment_hi"].get<double>());
    }
  }
  EXPECT_TRUE(j["error_budget"].contains("max_z_err_bound"));
}

TEST(Csv, HybridRowRoundTrips) {
  hybrid::HybridReport rep;
  rep.formula_id = hybrid::FormulaId::MIXED_52;
  rep.params.L = 150;
  rep.params.U = 0.1;
  rep.params.k1 = 2;
  rep.lhs = 1.0 / 3.0;
  rep.rhs = 0.25;
  std::ostringstream os;
  report::write_csv(os, rep);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header.substr(0, 12), "formula_id,L");
  EXPECT_NE(row.find("MIXED_52,150,0.10000000000000001,2,,,,,,"), std::string::npos);
  EXPECT_NE(row.find(report::fmt(1.0 / 3.0)), std::string::npos);
  EXPECT_EQ(std::stod(report::fmt(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, GapRow) {
  gaps::GapReport g;
  g.L = 300;
  g.U = 1.0;
  g.rho = 2.5;
  std::ostringstream os;
  gaps::write_csv_header(os);
  gaps::write_csv_row(os, g);
  EXPECT_EQ(os.str().substr(0, 8), "L,U,r,rh");
  EXPECT_NE(os.str().find("\n300,1,0,2.5,"), std::string::npos);
  const auto j = report::to_json(g);
  EXPECT_EQ(j["rho"], 2.5);
}
