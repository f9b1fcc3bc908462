// jladder: build the cumulative table, verify hybrid formulas, run scans.
//
// Exit codes: 0 pass, 1 tolerance failure, 2 usage or configuration error,
// 3 numerical failure.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "jladder/gaps.hpp"
#include "jladder/hybrid.hpp"
#include "jladder/ladder.hpp"
#include "jladder/rational.hpp"
#include "jladder/report.hpp"
#include "jladder/tower.hpp"

namespace {

using namespace jladder;
using report::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct GlobalFlags {
  report::RunConfig run;
  std::string cache_dir;
  std::string format = "json";
  std::string out;
};

std::optional<hybrid::FormulaId> parse_formula(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(name.begin(), name.end(), '_', '-');
  static const std::map<std::string, hybrid::FormulaId> names = {
      {"echf1", hybrid::FormulaId::ECHF1},
      {"echf2", hybrid::FormulaId::ECHF2},
      {"beta-elim", hybrid::FormulaId::BETA_ELIM_42},
      {"beta-elim-42", hybrid::FormulaId::BETA_ELIM_42},
      {"secondary1", hybrid::FormulaId::SECONDARY1_44},
      {"secondary1-44", hybrid::FormulaId::SECONDARY1_44},
      {"secondary1-special", hybrid::FormulaId::SECONDARY1_11},
      {"secondary1-11", hybrid::FormulaId::SECONDARY1_11},
      {"mixed", hybrid::FormulaId::MIXED_52},
      {"mixed-52", hybrid::FormulaId::MIXED_52},
      {"secondary2", hybrid::FormulaId::SECONDARY2_54},
      {"secondary2-54", hybrid::FormulaId::SECONDARY2_54},
      {"ternary", hybrid::FormulaId::TERNARY_61},
      {"ternary-61", hybrid::FormulaId::TERNARY_61},
      {"asymptotic", hybrid::FormulaId::ASYMPTOTIC_17},
      {"asymptotic-17", hybrid::FormulaId::ASYMPTOTIC_17},
  };
  auto it = names.find(name);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::trunc);
      if (!file_) throw Error(ErrorKind::Io, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void finalize(GlobalFlags& g) {
  g.run.cache_dir = report::resolve_cache_dir(g.cache_dir);
  if (g.format == "json") {
    g.run.format = report::Format::Json;
  } else if (g.format == "csv") {
    g.run.format = report::Format::Csv;
  } else {
    throw Error(ErrorKind::InvalidArgument, "format must be json or csv");
  }
  g.run.validate();
}

std::optional<hybrid::DeltaPair> delta_pair(const std::string& d3, const std::string& d4) {
  if (d3.empty() && d4.empty()) return std::nullopt;
  if (d3.empty() || d4.empty()) throw Error(ErrorKind::InvalidArgument, "give both --delta3 and --delta4");
  return hybrid::DeltaPair(Rational::parse(d3), Rational::parse(d4));
}

struct VerifyFlags {
  std::string formula;
  std::string delta3, delta4;
  int L = 0;
  double U = 0.0;
  std::optional<int> k, k1, k2, k3, k4;
};

int cmd_verify(GlobalFlags& g, const VerifyFlags& v) {
  const auto id = parse_formula(v.formula);
  if (!id) throw Error(ErrorKind::InvalidArgument, "unknown formula '" + v.formula + "'");
  hybrid::Params p;
  p.L = v.L;
  p.U = v.U;
  p.k1 = v.k1 ? v.k1 : v.k;
  p.k2 = v.k2 ? v.k2 : v.k;
  p.k3 = v.k3 ? v.k3 : v.k;
  p.k4 = v.k4 ? v.k4 : v.k;
  p.delta = delta_pair(v.delta3, v.delta4);
  if (*id == hybrid::FormulaId::SECONDARY1_11 && !p.delta) p.delta = hybrid::DeltaPair(Rational(1, 3), Rational(1, 5));

  auto model = report::open_model(g.run);
  tower::ChainWorkbench bench(*model, g.run.limits());
  const auto rep = hybrid::evaluate(*id, bench, p);
  report::save_model(g.run, *model);

  Output out(g.out);
  if (g.run.format == report::Format::Json) {
    json j{{"config", report::to_json(g.run, *model)}, {"report", report::to_json(rep)}};
    out.stream() << j.dump(2) << "\n";
  } else {
    report::write_csv(out.stream(), rep);
  }
  return rep.pass ? kExitPass : kExitFail;
}

struct ScanFlags {
  std::string delta3 = "1/3", delta4 = "1/5";
  std::size_t n = 20;
  hybrid::ScanRanges ranges;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> gap_L = {300, 500, 1000};
  double gap_U = 1.0;
  int gap_r = 0;
};

int cmd_scan_invariance(GlobalFlags& g, const ScanFlags& s) {
  const auto pair = *delta_pair(s.delta3, s.delta4);
  auto model = report::open_model(g.run);
  tower::ChainWorkbench bench(*model, g.run.limits());
  const auto scan = hybrid::invariance_scan(bench, pair, s.n, g.run.seed, s.ranges, s.workers);
  report::save_model(g.run, *model);

  Output out(g.out);
  if (g.run.format == report::Format::Json) {
    json j{{"config", report::to_json(g.run, *model)},
           {"delta3", pair.d3().to_string()},
           {"delta4", pair.d4().to_string()},
           {"tolerance", 1e-5},
           {"scan", report::to_json(scan)}};
    out.stream() << j.dump(2) << "\n";
  } else {
    report::write_csv(out.stream(), scan);
  }
  for (const auto& x : scan.samples) {
    if (!x.error.empty()) std::cerr << "sample U=" << x.U << " L=" << x.L << " failed: " << x.error << "\n";
  }
  return scan.failures == 0 && scan.max_rel_dev <= 1e-5 ? kExitPass : kExitFail;
}

int cmd_scan_gaps(GlobalFlags& g, const ScanFlags& s) {
  auto model = report::open_model(g.run);
  std::vector<gaps::GapReport> rows;
  for (int L : s.gap_L) {
    const auto tw = tower::build_tower(*model, L, s.gap_U, s.gap_r + 1, g.run.limits());
    rows.push_back(gaps::gap_rho(tw, s.gap_r));
  }
  report::save_model(g.run, *model);

  bool hard_fail = false;
  for (const auto& r : rows) {
    if (r.ratio < 0.7 || r.ratio > 1.3) {
      std::cerr << "warning: gap ratio " << r.ratio << " at L=" << r.L << " outside [0.7, 1.3]\n";
    }
    hard_fail = hard_fail || r.ratio < 0.5 || r.ratio > 1.5;
  }
  Output out(g.out);
  if (g.run.format == report::Format::Json) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(report::to_json(r));
    json j{{"config", report::to_json(g.run, *model)}, {"band", {0.7, 1.3}}, {"gaps", arr}};
    out.stream() << j.dump(2) << "\n";
  } else {
    gaps::write_csv_header(out.stream());
    for (const auto& r : rows) gaps::write_csv_row(out.stream(), r);
  }
  return hard_fail ? kExitFail : kExitPass;
}

int cmd_scan_asymptotic(GlobalFlags& g, const ScanFlags& s) {
  const auto pair = *delta_pair(s.delta3, s.delta4);
  auto model = report::open_model(g.run);
  tower::ChainWorkbench bench(*model, g.run.limits());
  s.ranges.validate(g.run.L0, g.run.k0);
  const auto samples = hybrid::draw_samples(s.n, g.run.seed, s.ranges);
  std::vector<hybrid::HybridReport> reports;
  std::vector<std::string> errors;
  for (const auto& x : samples) {
    hybrid::Params p;
    p.L = x.L;
    p.U = x.U;
    p.k1 = x.k1;
    p.k2 = x.k2;
    p.delta = pair;
    try {
      reports.push_back(hybrid::asymptotic_secondary(bench, p));
    } catch (const Error& e) {
      if (e.is_usage()) throw;
      errors.push_back(e.what());
    }
  }
  report::save_model(g.run, *model);

  bool all_pass = errors.empty();
  for (const auto& r : reports) all_pass = all_pass && r.pass;
  Output out(g.out);
  if (g.run.format == report::Format::Json) {
    json arr = json::array();
    for (const auto& r : reports) {
      arr.push_back({{"params", report::to_json(r.params)},
                     {"raw_lhs", r.lhs},
                     {"constant", r.rhs},
                     {"raw_deviation", r.extras.at("raw_deviation")},
                     {"predicted_deviation", r.extras.at("predicted_deviation")},
                     {"predicted_deviation_log_t", r.extras.at("predicted_deviation_log_t")},
                     {"deviation_ratio", r.extras.at("deviation_ratio")},
                     {"anchor_rel_residual", r.extras.at("anchor_rel_residual")},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass}});
    }
    json j{{"config", report::to_json(g.run, *model)}, {"samples", arr}, {"errors", errors}};
    out.stream() << j.dump(2) << "\n";
  } else {
    auto& os = out.stream();
    os << "U,L,k1,k2,raw_deviation,predicted_deviation,predicted_deviation_log_t,deviation_ratio,anchor_rel_residual,pass\n";
    for (const auto& r : reports) {
      os << report::fmt(r.params.U) << ',' << r.params.L << ',' << *r.params.k1 << ',' << *r.params.k2 << ','
         << report::fmt(r.extras.at("raw_deviation")) << ',' << report::fmt(r.extras.at("predicted_deviation"))
         << ',' << report::fmt(r.extras.at("predicted_deviation_log_t")) << ','
         << report::fmt(r.extras.at("deviation_ratio")) << ',' << report::fmt(r.extras.at("anchor_rel_residual"))
         << ',' << (r.pass ? 1 : 0) << '\n';
    }
  }
  for (const auto& e : errors) std::cerr << "sample failed: " << e << "\n";
  return all_pass ? kExitPass : kExitFail;
}

int cmd_ladder_build(GlobalFlags& g, double tmax) {
  if (!g.run.cache_file()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("ladder-build needs --cache-dir or ") + report::kCacheEnv);
  }
  auto model = report::open_model(g.run);
  model->ensure_table(tmax);
  report::save_model(g.run, *model);
  const auto table = model->snapshot();
  json j{{"config", report::to_json(g.run, *model)},
         {"cache", g.run.cache_file()->string()},
         {"t_end", table.t_end()},
         {"knots", table.size()}};
  Output out(g.out);
  out.stream() << j.dump(2) << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ladder model of Hardy's Z function: hybrid formula verification"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--L0", g.run.L0, "Floor for L")->capture_default_str();
  app.add_option("--k0", g.run.k0, "Cap for chain depths")->capture_default_str();
  app.add_option("--quad-tol", g.run.quad_tol, "Quadrature tolerance per unit length")->capture_default_str();
  app.add_option("--root-tol", g.run.root_tol, "Root tolerance")->capture_default_str();
  app.add_option("--rs-depth", g.run.rs_depth, "Riemann-Siegel correction terms beyond C0")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, std::string("Cache directory (default $") + report::kCacheEnv + ")");
  app.add_option("--format", g.format, "json or csv")->capture_default_str();
  app.add_option("--out", g.out, "Write the report here instead of stdout");
  app.add_option("--seed", g.run.seed, "Seed for sampled scans")->capture_default_str();

  double tmax = 0.0;
  auto* build = app.add_subcommand("ladder-build", "Extend the cached cumulative table");
  build->add_option("--tmax", tmax, "Height to extend to")->required();

  VerifyFlags v;
  auto* verify = app.add_subcommand("verify", "Evaluate one hybrid formula");
  verify->add_option("formula", v.formula,
                     "echf1 echf2 beta-elim secondary1 secondary1-special mixed secondary2 ternary asymptotic")
      ->required();
  verify->add_option("--delta3", v.delta3, "Exponent, e.g. 1/3");
  verify->add_option("--delta4", v.delta4, "Exponent, e.g. 1/5");
  verify->add_option("--L", v.L, "Base segment index")->required();
  verify->add_option("--U", v.U, "Base segment length")->required();
  verify->add_option("--k", v.k, "Common depth for every unset k1..k4");
  verify->add_option("--k1", v.k1);
  verify->add_option("--k2", v.k2);
  verify->add_option("--k3", v.k3);
  verify->add_option("--k4", v.k4);

  ScanFlags s;
  auto* scan = app.add_subcommand("scan", "Sampled and gridded scans");
  scan->require_subcommand(1);
  auto add_sampling = [&s](CLI::App* sub) {
    sub->add_option("--delta3", s.delta3)->capture_default_str();
    sub->add_option("--delta4", s.delta4)->capture_default_str();
    sub->add_option("--n", s.n, "Number of samples")->capture_default_str();
    sub->add_option("--U-min", s.ranges.U_min)->capture_default_str();
    sub->add_option("--U-max", s.ranges.U_max)->capture_default_str();
    sub->add_option("--L-min", s.ranges.L_min)->capture_default_str();
    sub->add_option("--L-max", s.ranges.L_max)->capture_default_str();
    sub->add_option("--k-max", s.ranges.k_max)->capture_default_str();
  };
  auto* inv = scan->add_subcommand("invariance", "Sample the first secondary formula");
  add_sampling(inv);
  inv->add_option("--workers", s.workers)->capture_default_str();
  auto* asym = scan->add_subcommand("asymptotic", "Raw |zeta| variant against its omega-ratio prediction");
  add_sampling(asym);
  auto* gap = scan->add_subcommand("gaps", "Gaps between tower components");
  gap->add_option("--L", s.gap_L, "Base indices")->capture_default_str();
  gap->add_option("--U", s.gap_U)->capture_default_str();
  gap->add_option("--r", s.gap_r, "Component index")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    finalize(g);
    if (*build) return cmd_ladder_build(g, tmax);
    if (*verify) return cmd_verify(g, v);
    if (*inv) return cmd_scan_invariance(g, s);
    if (*asym) return cmd_scan_asymptotic(g, s);
    if (*gap) return cmd_scan_gaps(g, s);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_usage() ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
