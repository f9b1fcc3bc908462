#pragma once

// Run configuration, cache files and report serialization.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "jladder/error.hpp"
#include "jladder/gaps.hpp"
#include "jladder/hybrid.hpp"
#include "jladder/ladder.hpp"
#include "jladder/tower.hpp"

namespace jladder::report {

using json = nlohmann::ordered_json;

enum class Format { Json, Csv };

inline const char* to_string(Format f) { return f == Format::Json ? "json" : "csv"; }

inline constexpr const char* kCacheEnv = "JLADDER_CACHE_DIR";
inline constexpr const char* kCacheFile = "cumulative_table.csv";

struct RunConfig {
  int L0 = 100;
  int k0 = 4;
  double quad_tol = 1e-10;
  double root_tol = 1e-11;
  int rs_depth = 4;
  std::optional<std::filesystem::path> cache_dir;
  Format format = Format::Json;
  std::uint64_t seed = 20261016;

  void validate() const {
    if (!(quad_tol > 0.0) || !(root_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
    if (k0 < 1) throw Error(ErrorKind::InvalidArgument, "k0 must be at least 1");
    if (L0 < 1) throw Error(ErrorKind::InvalidArgument, "L0 must be at least 1");
  }

  ladder::LadderConfig ladder_config() const {
    ladder::LadderConfig cfg;
    cfg.table.quad_tol = quad_tol;
    cfg.table.zeta.rs_depth = rs_depth;
    cfg.root_tol = root_tol;
    return cfg;
  }

  tower::TowerLimits limits() const { return {L0, k0}; }

  std::optional<std::filesystem::path> cache_file() const {
    if (!cache_dir) return std::nullopt;
    return *cache_dir / kCacheFile;
  }
};

// Cache directory from the flag, else from the environment.
inline std::optional<std::filesystem::path> resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return std::filesystem::path(flag);
  if (const char* env = std::getenv(kCacheEnv); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

// Model backed by the cache file when one exists; a cache written under a
// different configuration is refused.
inline std::unique_ptr<ladder::LadderModel> open_model(const RunConfig& run) {
  const auto cfg = run.ladder_config();
  if (auto file = run.cache_file(); file && std::filesystem::exists(*file)) {
    return std::make_unique<ladder::LadderModel>(cfg, ladder::CumulativeTable::load(file->string(), cfg.table));
  }
  return std::make_unique<ladder::LadderModel>(cfg);
}

inline void save_model(const RunConfig& run, const ladder::LadderModel& model) {
  auto file = run.cache_file();
  if (!file) return;
  std::error_code ec;
  std::filesystem::create_directories(file->parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create cache directory " + file->parent_path().string());
  const auto tmp = file->string() + ".tmp";
  model.snapshot().save(tmp);
  std::filesystem::rename(tmp, *file, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move cache into place at " + file->string());
}

inline json to_json(const RunConfig& run, const ladder::LadderModel& model) {
  const auto& cfg = model.config();
  return json{{"L0", run.L0},
              {"k0", run.k0},
              {"quad_tol", run.quad_tol},
              {"root_tol", run.root_tol},
              {"rs_depth", run.rs_depth},
              {"rs_floor", cfg.table.zeta.rs_floor},
              {"knot_step", cfg.table.knot_step},
              {"normalizer", ladder::to_string(cfg.table.normalizer)},
              {"config_hash", cfg.table.hash()},
              {"cache", run.cache_file() ? json(run.cache_file()->string()) : json(nullptr)},
              {"seed", run.seed}};
}

inline json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const hybrid::Params& p) {
  json j{{"L", p.L}, {"U", p.U}, {"k1", optional_int(p.k1)}, {"k2", optional_int(p.k2)},
         {"k3", optional_int(p.k3)}, {"k4", optional_int(p.k4)}};
  if (p.delta) {
    j["delta3"] = p.delta->d3().to_string();
    j["delta4"] = p.delta->d4().to_string();
  } else {
    j["delta3"] = nullptr;
    j["delta4"] = nullptr;
  }
  return j;
}

inline json to_json(const hybrid::PointDump& d) {
  json rows = json::array();
  for (const auto& row : d.rows) {
    rows.push_back({{"r", row.r},
                    {"alpha", row.alpha},
                    {"beta", row.beta},
                    {"segment_lo", row.segment_lo},
                    {"segment_hi", row.segment_hi}});
  }
  return json{{"chain", d.label}, {"family", d.family}, {"k", d.k}, {"rows", rows}};
}

inline json to_json(const hybrid::ErrorBudget& b) {
  return json{{"table_quad_tol_per_unit", b.table_quad_tol},
              {"chain_quad_tol", b.chain_quad_tol},
              {"root_tol", b.root_tol},
              {"crossing_tol", b.crossing_tol},
              {"max_z_err_bound", b.max_z_err_bound},
              {"max_chain_residual", b.max_chain_residual}};
}

inline json to_json(const hybrid::HybridReport& r, bool with_timings = true) {
  json points = json::array();
  for (const auto& d : r.points) points.push_back(to_json(d));
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = v;
  json j{{"formula_id", hybrid::to_string(r.formula_id)},
         {"params", to_json(r.params)},
         {"lhs", r.lhs},
         {"rhs", r.rhs},
         {"rel_residual", r.rel_residual},
         {"tolerance", r.tolerance},
         {"pass", r.pass},
         {"condition", r.condition},
         {"extras", extras},
         {"notes", r.notes},
         {"points", points},
         {"error_budget", to_json(r.error_budget)}};
  if (with_timings) j["timings"] = json{{"total_s", r.seconds}};
  return j;
}

inline json to_json(const hybrid::InvarianceScan& s) {
  json samples = json::array();
  for (const auto& x : s.samples) {
    json row{{"U", x.U}, {"L", x.L}, {"k1", x.k1}, {"k2", x.k2}, {"lhs", x.lhs}, {"rel_dev", x.rel_dev}};
    if (!x.error.empty()) row["error"] = x.error;
    samples.push_back(row);
  }
  return json{{"seed", s.seed},
              {"n_samples", s.samples.size()},
              {"constant", s.constant},
              {"mean", s.mean},
              {"stddev", s.stddev},
              {"max_abs_dev", s.max_abs_dev},
              {"max_rel_dev", s.max_rel_dev},
              {"failures", s.failures},
              {"samples", samples}};
}

inline json to_json(const gaps::GapReport& g) {
  return json{{"L", g.L},          {"U", g.U},         {"r", g.r},
              {"rho", g.rho},      {"predicted", g.predicted}, {"ratio", g.ratio},
              {"predicted_li", g.predicted_li}};
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const hybrid::HybridReport& r) {
  os << "formula_id,L,U,k1,k2,k3,k4,delta3,delta4,lhs,rhs,rel_residual,tolerance,condition,pass\n";
  auto k = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
  const auto& p = r.params;
  os << hybrid::to_string(r.formula_id) << ',' << p.L << ',' << fmt(p.U) << ',' << k(p.k1) << ',' << k(p.k2)
     << ',' << k(p.k3) << ',' << k(p.k4) << ',' << (p.delta ? p.delta->d3().to_string() : "") << ','
     << (p.delta ? p.delta->d4().to_string() : "") << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ','
     << fmt(r.rel_residual) << ',' << fmt(r.tolerance) << ',' << fmt(r.condition) << ','
     << (r.pass ? 1 : 0) << '\n';
}

inline void write_csv(std::ostream& os, const hybrid::InvarianceScan& s) {
  os << "U,L,k1,k2,lhs,rel_dev,error\n";
  for (const auto& x : s.samples) {
    os << fmt(x.U) << ',' << x.L << ',' << x.k1 << ',' << x.k2 << ',' << fmt(x.lhs) << ',' << fmt(x.rel_dev)
       << ',' << '"' << x.error << '"' << '\n';
  }
}

}  // namespace jladder::report
