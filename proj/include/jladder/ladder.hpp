#pragma once

// Computational Jacob's ladder.
//
// The ladder phi1 is defined implicitly by V(phi1(T)) = A(T), where
//   A(T) = integral of Z(u)^2 over [0, T]
//   V(y) = y ln y + (c - ln 2pi) y.
// Differentiating gives phi1'(T) = Z(T)^2 / V'(phi1(T)), so with
// omega(t) = V'(phi1(t)) the normalized square Z~^2 = Z^2 / omega is exactly
// the derivative of phi1. Every change of variables along the ladder is
// therefore exact up to quadrature and root tolerances.
//
// A(T) is served from a table of knots at a fixed step plus one short
// quadrature from the knot below T.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jladder/error.hpp"
#include "jladder/numerics.hpp"
#include "jladder/zeta.hpp"

namespace jladder::ladder {

struct Constants {
  static constexpr double euler_c = 0.57721566490153286061;
  static constexpr double ln_two_pi = 1.8378770664093454836;
};

enum class NormalizerId { HlStandard };

inline const char* to_string(NormalizerId id) {
  switch (id) {
    case NormalizerId::HlStandard: return "HL_STANDARD";
  }
  return "UNKNOWN";
}

// V'(y) vanishes here; every admissible t_min lies strictly above it.
inline double normalizer_critical_point() {
  return zeta::kTwoPi * std::exp(-1.0 - Constants::euler_c);
}

inline constexpr double kDefaultTMin = 2.0;

inline void check_normalizer_domain(double y, double t_min) {
  if (!(y >= t_min)) {
    std::ostringstream os;
    os << "normalizer evaluated at y = " << y << " below t_min = " << t_min;
    throw Error(ErrorKind::DomainTooSmall, os.str());
  }
}

// V(y) = y ln y + (c - ln 2pi) y
inline double normalizer(double y, double t_min = kDefaultTMin) {
  check_normalizer_domain(y, t_min);
  return y * std::log(y) + (Constants::euler_c - Constants::ln_two_pi) * y;
}

// V'(y) = ln y + 1 + c - ln 2pi
inline double normalizer_prime(double y, double t_min = kDefaultTMin) {
  check_normalizer_domain(y, t_min);
  return std::log(y) + 1.0 + Constants::euler_c - Constants::ln_two_pi;
}

// Panel cap for integrands built from Z^2: Z oscillates with local angular
// frequency theta'(t) ~ ln(t / 2pi) / 2.
inline double oscillation_wavelength(double t) {
  return zeta::kTwoPi / std::max(1.0, std::log(t / zeta::kTwoPi));
}

// Settings that determine the knot values of the cumulative table.
struct TableConfig {
  double quad_tol = 1e-10;  // absolute tolerance per unit length of t
  double knot_step = 1.0;
  zeta::ZetaOptions zeta{};
  NormalizerId normalizer = NormalizerId::HlStandard;

  void validate() const {
    if (!(quad_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "quad_tol must be positive");
    if (!(knot_step > 0.0 && knot_step <= 2.0)) {
      throw Error(ErrorKind::InvalidArgument, "knot_step must lie in (0, 2]");
    }
    zeta.validate();
  }

  std::string canonical() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "quad_tol=%.17g;normalizer=%s;rs_depth=%d;rs_floor=%.17g;knot_step=%.17g",
                  quad_tol, to_string(normalizer), zeta.rs_depth, zeta.rs_floor, knot_step);
    return buf;
  }

  // FNV-1a over the canonical string.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
  }
};

// Knots (i * step, A(i * step)) for i = 0..n-1.
class CumulativeTable {
 public:
  explicit CumulativeTable(TableConfig config = {}) : config_(std::move(config)) {
    config_.validate();
    values_.push_back(0.0);
  }

  const TableConfig& config() const { return config_; }
  std::string config_hash() const { return config_.hash(); }
  double step() const { return config_.knot_step; }
  std::size_t size() const { return values_.size(); }
  double t_end() const { return step() * static_cast<double>(values_.size() - 1); }
  double value(std::size_t i) const { return values_.at(i); }
  double knot_t(std::size_t i) const { return step() * static_cast<double>(i); }

  std::vector<std::pair<double, double>> knots() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out.emplace_back(knot_t(i), values_[i]);
    return out;
  }

  double z_sq(double t) const { return zeta::zeta_mod_sq(t, config_.zeta); }

  // Integral of Z^2 over [a, b] inside one cell.
  double integrate_cell(double a, double b) const {
    if (b <= a) return 0.0;
    auto f = [this](double u) { return z_sq(u); };
    return numerics::integrate(f, a, b, config_.quad_tol * step(), oscillation_wavelength(b)).value;
  }

  void extend_to_index(std::size_t last) {
    values_.reserve(last + 1);
    while (values_.size() <= last) {
      const std::size_t i = values_.size();
      values_.push_back(values_.back() + integrate_cell(knot_t(i - 1), knot_t(i)));
    }
  }

  void extend_to(double t) {
    if (t <= t_end()) return;
    extend_to_index(static_cast<std::size_t>(std::ceil(t / step())));
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write cache file " + path);
    out << "# jladder cumulative table v1\n";
    out << "# config_hash=" << config_hash() << "\n";
    out << "# config=" << config_.canonical() << "\n";
    out << "t,a\n";
    char buf[96];
    for (std::size_t i = 0; i < values_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", knot_t(i), values_[i]);
      out << buf;
    }
    if (!out) throw Error(ErrorKind::Io, "failed writing cache file " + path);
  }

  // Loads a cache written under the same TableConfig; any other hash is refused.
  static CumulativeTable load(const std::string& path, const TableConfig& config) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open cache file " + path);
    CumulativeTable table(config);
    std::string line;
    bool saw_version = false;
    bool saw_hash = false;
    bool saw_header = false;
    std::vector<double> values;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.rfind("# jladder cumulative table v1", 0) == 0) {
        saw_version = true;
      } else if (line.rfind("# config_hash=", 0) == 0) {
        const std::string hash = line.substr(14);
        if (hash != config.hash()) {
          throw Error(ErrorKind::ConfigMismatch, "cache " + path + " has config_hash " + hash +
                                                     ", current configuration is " + config.hash());
        }
        saw_hash = true;
      } else if (line[0] == '#') {
        continue;
      } else if (line == "t,a") {
        saw_header = true;
      } else {
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::Io, "malformed cache row: " + line);
        const double t = std::stod(line.substr(0, comma));
        const double a = std::stod(line.substr(comma + 1));
        const double expected_t = table.knot_t(values.size());
        if (std::abs(t - expected_t) > 1e-9 * std::max(1.0, expected_t)) {
          throw Error(ErrorKind::Io, "cache knot out of sequence at t = " + line.substr(0, comma));
        }
        if (!values.empty() && a < values.back()) {
          throw Error(ErrorKind::Io, "cache values not monotone at t = " + line.substr(0, comma));
        }
        values.push_back(a);
      }
    }
    if (!saw_version || !saw_hash || !saw_header) {
      throw Error(ErrorKind::Io, "cache file " + path + " is missing its version/hash header");
    }
    if (values.empty() || values.front() != 0.0) {
      throw Error(ErrorKind::Io, "cache file " + path + " must start with A(0) = 0");
    }
    table.values_ = std::move(values);
    return table;
  }

 private:
  TableConfig config_;
  std::vector<double> values_;
};

struct LadderConfig {
  TableConfig table{};
  double root_tol = 1e-11;
  double t_min = kDefaultTMin;
  double t_start = 200.0;
  double t_max = 2.0e5;

  void validate() const {
    table.validate();
    if (!(root_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "root_tol must be positive");
    if (!(t_min > normalizer_critical_point())) {
      throw Error(ErrorKind::InvalidArgument, "t_min must exceed 2pi exp(-1-c) so that V' > 0");
    }
    if (!(t_start >= t_min && t_max > t_start)) {
      throw Error(ErrorKind::InvalidArgument, "require t_min <= t_start < t_max");
    }
  }
};

// The ladder model. All evaluation methods are const and may be called from
// many threads; table growth is serialized behind a writer lock.
class LadderModel {
 public:
  explicit LadderModel(LadderConfig config = {}) : config_(config), table_(config.table) {
    config_.validate();
  }

  LadderModel(LadderConfig config, CumulativeTable table)
      : config_(config), table_(std::move(table)) {
    config_.validate();
    if (table_.config_hash() != config_.table.hash()) {
      throw Error(ErrorKind::ConfigMismatch, "table was built under a different configuration");
    }
  }

  LadderModel(const LadderModel&) = delete;
  LadderModel& operator=(const LadderModel&) = delete;

  const LadderConfig& config() const { return config_; }

  CumulativeTable snapshot() const {
    std::shared_lock lock(mutex_);
    return table_;
  }

  void ensure_table(double t) const {
    if (t > config_.t_max) {
      std::ostringstream os;
      os << "height " << t << " exceeds the table limit t_max = " << config_.t_max;
      throw Error(ErrorKind::TableExhausted, os.str());
    }
    {
      std::shared_lock lock(mutex_);
      if (t <= table_.t_end()) return;
    }
    std::unique_lock lock(mutex_);
    table_.extend_to(t);
  }

  double v(double y) const { return normalizer(y, config_.t_min); }
  double v_prime(double y) const { return normalizer_prime(y, config_.t_min); }

  double z_sq(double t) const { return zeta::zeta_mod_sq(t, config_.table.zeta); }

  // A(T) = integral of Z^2 over [0, T].
  double cumulative_hl(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorKind::DomainTooSmall, "cumulative_hl requires T >= 0");
    ensure_table(t);
    const double step = config_.table.knot_step;
    const auto i = static_cast<std::size_t>(std::floor(t / step));
    const double t_knot = step * static_cast<double>(i);
    double base;
    {
      std::shared_lock lock(mutex_);
      base = table_.value(i);
    }
    if (t <= t_knot) return base;
    auto f = [this](double u) { return z_sq(u); };
    return base +
           numerics::integrate(f, t_knot, t, config_.table.quad_tol * step, oscillation_wavelength(t))
               .value;
  }

  // Solves V(y) = A(t).
  double phi1(double t) const {
    if (!(t >= config_.t_start)) {
      std::ostringstream os;
      os << "phi1 requires t >= t_start = " << config_.t_start << ", got " << t;
      throw Error(ErrorKind::DomainTooSmall, os.str());
    }
    const double target = cumulative_hl(t);
    double hi = t;
    while (v(hi) < target) hi *= 2.0;
    auto vf = [this](double y) { return v(y); };
    return numerics::invert_increasing(vf, numerics::Bracket(config_.t_min, hi), target,
                                       config_.root_tol);
  }

  double omega(double t) const { return v_prime(phi1(t)); }

  double ztilde_sq(double t) const { return z_sq(t) / omega(t); }

  // One reverse iteration: the height u > x with phi1(u) = x, i.e. A(u) = V(x).
  double reverse_step(double x) const {
    const double target = v(x);
    const double a_x = cumulative_hl(x);
    if (!(a_x < target)) {
      std::ostringstream os;
      os << "reverse_step needs A(x) < V(x); at x = " << x << " A = " << a_x << ", V = " << target;
      throw Error(ErrorKind::DomainTooSmall, os.str());
    }
    double width = std::max(10.0, 2.0 * (1.0 - Constants::euler_c) * x / std::log(x));
    double hi = x + width;
    while (cumulative_hl(hi) < target) {
      width *= 2.0;
      hi = x + width;
      if (hi > config_.t_max) {
        std::ostringstream os;
        os << "reverse_step(" << x << ") needs heights beyond t_max = " << config_.t_max;
        throw Error(ErrorKind::TableExhausted, os.str());
      }
    }
    auto af = [this](double u) { return cumulative_hl(u); };
    return numerics::invert_increasing(af, numerics::Bracket(x, hi), target, config_.root_tol);
  }

  // phi1 applied j times.
  double forward_iterate(double t, int j) const {
    for (int i = 0; i < j; ++i) t = phi1(t);
    return t;
  }

  // reverse_step applied r times.
  double reverse_iterate(double x, int r) const {
    for (int i = 0; i < r; ++i) x = reverse_step(x);
    return x;
  }

 private:
  LadderConfig config_;
  mutable std::shared_mutex mutex_;
  mutable CumulativeTable table_;
};

}  // namespace jladder::ladder
