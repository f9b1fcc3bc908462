#pragma once

// Iteration towers and mean-value point chains.
//
// For a base segment [piL, piL+U] the tower holds its reverse iterates
// r = 0..k. A generating function f on the base pulls back to segment k as
//   g(t) = f(phi1^k(t)) * prod_{j<k} Z~^2(phi1^j(t)),
// whose integral over segment k equals the integral of f over the base.
// The chain for f is the leftmost xi in segment k where g meets its mean,
// together with its forward images alpha_r = phi1^(k-r)(xi).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <future>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "jladder/error.hpp"
#include "jladder/ladder.hpp"
#include "jladder/numerics.hpp"
#include "jladder/rational.hpp"

namespace jladder::tower {

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  int r = 0;

  double length() const { return hi - lo; }
  bool contains_open(double x) const { return lo < x && x < hi; }
};

struct IterationTower {
  int L = 0;
  double U = 0.0;
  int k = 0;
  std::vector<Segment> segments;

  double base_lo() const { return segments.front().lo; }
  const Segment& top() const { return segments.back(); }
};

enum class FamilyKind { Sin2, Cos2, PowerDelta, One };

// Generating functions of class C~0 on the base segment.
struct FunctionFamily {
  FamilyKind kind = FamilyKind::One;
  Rational delta{0};  // exponent, PowerDelta only

  static FunctionFamily sin2() { return {FamilyKind::Sin2, Rational(0)}; }
  static FunctionFamily cos2() { return {FamilyKind::Cos2, Rational(0)}; }
  static FunctionFamily one() { return {FamilyKind::One, Rational(0)}; }
  static FunctionFamily power(Rational delta) {
    if (!(delta > Rational(0))) throw Error(ErrorKind::InvalidArgument, "PowerDelta needs delta > 0");
    return {FamilyKind::PowerDelta, delta};
  }

  // base_lo is piL, the shift used by PowerDelta.
  double operator()(double t, double base_lo) const {
    switch (kind) {
      case FamilyKind::Sin2: {
        const double s = std::sin(t);
        return s * s;
      }
      case FamilyKind::Cos2: {
        const double c = std::cos(t);
        return c * c;
      }
      case FamilyKind::PowerDelta: return std::pow(std::max(0.0, t - base_lo), delta.to_double());
      case FamilyKind::One: return 1.0;
    }
    return 0.0;
  }

  // f at piL + a for integer L, written in the offset a so that points very
  // close to piL keep their relative precision.
  double at_offset(double a) const {
    switch (kind) {
      case FamilyKind::Sin2: {
        const double s = std::sin(a);
        return s * s;
      }
      case FamilyKind::Cos2: {
        const double c = std::cos(a);
        return c * c;
      }
      case FamilyKind::PowerDelta: return std::pow(std::max(0.0, a), delta.to_double());
      case FamilyKind::One: return 1.0;
    }
    return 0.0;
  }

  // Mean over a base segment [piL, piL+U], in closed form.
  double base_mean(double U) const {
    switch (kind) {
      case FamilyKind::Sin2: return 0.5 * (1.0 - std::sin(2.0 * U) / (2.0 * U));
      case FamilyKind::Cos2: return 0.5 * (1.0 + std::sin(2.0 * U) / (2.0 * U));
      case FamilyKind::PowerDelta: {
        const double d = delta.to_double();
        return std::pow(U, d) / (1.0 + d);
      }
      case FamilyKind::One: return 1.0;
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case FamilyKind::Sin2: return "sin2";
      case FamilyKind::Cos2: return "cos2";
      case FamilyKind::PowerDelta: return "power(" + delta.to_string() + ")";
      case FamilyKind::One: return "one";
    }
    return "?";
  }

  friend bool operator==(const FunctionFamily&, const FunctionFamily&) = default;
  friend auto operator<=>(const FunctionFamily& a, const FunctionFamily& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    return a.delta <=> b.delta;
  }
};

struct ChainPoints {
  FunctionFamily f;
  int k = 0;
  double xi = 0.0;
  double a0 = 0.0;                  // alpha_0 - piL, held exactly
  std::vector<double> alpha;        // alpha_0 .. alpha_k, alpha_k = xi
  std::vector<double> ztilde_sq;    // Z~^2(alpha_r) at index r; index 0 unused (NaN)
  std::vector<double> zeta_sq;      // Z(alpha_r)^2 at index r; index 0 unused (NaN)
  std::vector<double> omega;        // omega(alpha_r) at index r; index 0 unused (NaN)
  double f_alpha0 = 0.0;
  double level = 0.0;               // mean of g over segment k
  double residual = 0.0;            // |g(xi) - level|
  bool inside = true;               // every alpha_r strictly inside segment r

  double alpha0() const { return alpha.front(); }

  // Sum of ln Z~^2(alpha_r), r = 1..k.
  double log_product() const {
    double s = 0.0;
    for (int r = 1; r <= k; ++r) s += std::log(ztilde_sq[static_cast<std::size_t>(r)]);
    return s;
  }

  // Sum of |ln Z~^2(alpha_r)|, r = 1..k.
  double condition() const {
    double s = 0.0;
    for (int r = 1; r <= k; ++r) s += std::abs(std::log(ztilde_sq[static_cast<std::size_t>(r)]));
    return s;
  }
};

struct ChainSet {
  IterationTower tower;
  std::map<FunctionFamily, ChainPoints> chains;
  ChainPoints beta;

  const ChainPoints& at(const FunctionFamily& f) const {
    auto it = chains.find(f);
    if (it == chains.end()) {
      throw Error(ErrorKind::MissingChain, "chain set has no chain for " + f.name());
    }
    return it->second;
  }
};

struct TowerLimits {
  int L0 = 100;  // floor for L
  int k0 = 4;    // cap for chain depth
};

struct ChainOptions {
  std::size_t scan_points = 512;
  double crossing_tol = 1e-11;
  double quad_tol = 1e-10;          // absolute, for the mean of g
  double condition_bound = 1000.0;  // lemma residuals refuse beyond this kappa
};

inline IterationTower build_tower(const ladder::LadderModel& model, int L, double U, int k,
                                  const TowerLimits& limits = {}) {
  if (L < limits.L0) {
    std::ostringstream os;
    os << "L = " << L << " below the configured floor L0 = " << limits.L0;
    throw Error(ErrorKind::DomainTooSmall, os.str());
  }
  if (!(U > 0.0 && U < 0.5 * std::numbers::pi)) {
    throw Error(ErrorKind::InvalidArgument, "U must lie in (0, pi/2)");
  }
  if (k < 0 || k > limits.k0) {
    std::ostringstream os;
    os << "chain depth k = " << k << " outside [0, k0 = " << limits.k0 << "]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  IterationTower tower{L, U, k, {}};
  const double lo = std::numbers::pi * L;
  tower.segments.push_back({lo, lo + U, 0});
  for (int r = 1; r <= k; ++r) {
    const auto& prev = tower.segments.back();
    tower.segments.push_back({model.reverse_step(prev.lo), model.reverse_step(prev.hi), r});
  }
  return tower;
}

// The pulled-back weight g on the top segment of a tower.
class ChainWeight {
 public:
  ChainWeight(const ladder::LadderModel& model, FunctionFamily f, const IterationTower& tower)
      : model_(&model), f_(f), k_(tower.k), base_lo_(tower.base_lo()) {}

  double operator()(double t) const {
    double prod = 1.0;
    for (int j = 0; j < k_; ++j) {
      const double next = model_->phi1(t);
      prod *= model_->z_sq(t) / model_->v_prime(next);
      t = next;
    }
    return f_(t, base_lo_) * prod;
  }

  int depth() const { return k_; }

 private:
  const ladder::LadderModel* model_;
  FunctionFamily f_;
  int k_;
  double base_lo_;
};

inline ChainWeight chain_weight(const ladder::LadderModel& model, const FunctionFamily& f,
                                const IterationTower& tower) {
  return ChainWeight(model, f, tower);
}

// Integral of the pulled-back weight over the top segment.
inline numerics::QuadratureResult integrate_chain_weight(const ladder::LadderModel& model,
                                                         const FunctionFamily& f,
                                                         const IterationTower& tower, double tol) {
  const auto& seg = tower.top();
  const double cap = ladder::oscillation_wavelength(seg.hi) / std::max(1, tower.k);
  return numerics::integrate(chain_weight(model, f, tower), seg.lo, seg.hi, tol, cap);
}

namespace detail {

// The chain through base point piL + a: alpha_r = reverse^r(piL + a).
inline ChainPoints chain_from_offset(const ladder::LadderModel& model, const FunctionFamily& f,
                                     const IterationTower& tower, double a) {
  ChainPoints out;
  out.f = f;
  out.k = tower.k;
  out.a0 = a;
  const auto n = static_cast<std::size_t>(tower.k) + 1;
  out.alpha.assign(n, 0.0);
  out.ztilde_sq.assign(n, std::nan(""));
  out.zeta_sq.assign(n, std::nan(""));
  out.omega.assign(n, std::nan(""));
  out.alpha[0] = tower.base_lo() + a;
  for (int r = 1; r <= tower.k; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    const double t = model.reverse_step(out.alpha[idx - 1]);
    out.alpha[idx] = t;
    out.zeta_sq[idx] = model.z_sq(t);
    out.omega[idx] = model.v_prime(model.phi1(t));
    out.ztilde_sq[idx] = out.zeta_sq[idx] / out.omega[idx];
  }
  out.xi = out.alpha.back();
  out.f_alpha0 = f.at_offset(a);
  return out;
}

inline double chain_weight_value(const ChainPoints& c) {
  double prod = c.f_alpha0;
  for (int r = 1; r <= c.k; ++r) prod *= c.ztilde_sq[static_cast<std::size_t>(r)];
  return prod;
}

}  // namespace detail

// The leftmost crossing is located by scanning g on the top segment and then
// refined in the base offset a = alpha_0 - piL, where g(xi) becomes
// f(piL + a) prod_r Z~^2(reverse^r(piL + a)). Crossings that sit extremely
// close to piL are thereby resolved to full relative precision in a.
inline ChainPoints solve_chain(const ladder::LadderModel& model, const FunctionFamily& f,
                               const IterationTower& tower, const ChainOptions& options = {}) {
  const auto& seg = tower.top();
  const auto g = chain_weight(model, f, tower);
  const double mean =
      integrate_chain_weight(model, f, tower, options.quad_tol).value / seg.length();
  const auto br = numerics::scan_level_crossing(g, seg.lo, seg.hi, mean, options.scan_points);

  auto offset_of = [&](double t) {
    if (t <= seg.lo) return 0.0;
    if (t >= seg.hi) return tower.U;
    return std::clamp(model.forward_iterate(t, tower.k) - tower.base_lo(), 0.0, tower.U);
  };
  auto h = [&](double a) {
    return detail::chain_weight_value(detail::chain_from_offset(model, f, tower, a)) - mean;
  };

  double a_root;
  const double a_lo = offset_of(br.lo);
  const double a_hi = br.exact ? a_lo : offset_of(br.hi);
  const double h_lo = br.exact ? 0.0 : h(a_lo);
  const double h_hi = br.exact ? 0.0 : h(a_hi);
  if (br.exact || !(a_lo < a_hi)) {
    a_root = a_lo;
  } else if (h_lo == 0.0) {
    a_root = a_lo;
  } else if (h_hi == 0.0) {
    a_root = a_hi;
  } else if ((h_lo < 0.0) != (h_hi < 0.0)) {
    a_root = numerics::detail::refine_root(h, a_lo, a_hi, h_lo, h_hi, 0.0);
  } else {
    // The two coordinates disagree on the sign at a bracket end; fall back
    // to refining in the top coordinate.
    auto ht = [&](double t) { return g(t) - mean; };
    const double xi = numerics::detail::refine_root(ht, br.lo, br.hi, br.h_lo, br.h_hi, options.crossing_tol);
    a_root = offset_of(xi);
  }

  ChainPoints out = detail::chain_from_offset(model, f, tower, a_root);
  out.level = mean;
  out.residual = std::abs(detail::chain_weight_value(out) - mean);
  out.inside = 0.0 < a_root && a_root < tower.U;
  for (int r = 1; r <= tower.k; ++r) {
    out.inside = out.inside &&
                 tower.segments[static_cast<std::size_t>(r)].contains_open(out.alpha[static_cast<std::size_t>(r)]);
  }
  return out;
}

inline ChainPoints beta_chain(const ladder::LadderModel& model, const IterationTower& tower,
                              const ChainOptions& options = {}) {
  return solve_chain(model, FunctionFamily::one(), tower, options);
}

struct LemmaResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_residual = 0.0;
  double condition = 0.0;
};

// Residual of prod Z~^2(alpha_r)/Z~^2(beta_r) = mean(f)/f(alpha_0), the
// factorization identity behind the sin^2, cos^2 and power lemmas.
inline LemmaResult lemma_residual(const ChainPoints& chain, const ChainPoints& beta, double U,
                                  const ChainOptions& options = {}) {
  if (chain.k != beta.k) throw Error(ErrorKind::MissingChain, "alpha and beta chains differ in depth");
  const double log_lhs = chain.log_product() - beta.log_product();
  const double log_rhs = std::log(chain.f.base_mean(U)) - std::log(chain.f_alpha0);
  LemmaResult out;
  out.lhs = std::exp(log_lhs);
  out.rhs = std::exp(log_rhs);
  out.rel_residual = std::abs(std::expm1(log_lhs - log_rhs));
  out.condition = chain.condition() + beta.condition();
  if (out.condition > options.condition_bound) {
    std::ostringstream os;
    os << "condition " << out.condition << " exceeds bound " << options.condition_bound << " for "
       << chain.f.name() << " at k = " << chain.k;
    throw Error(ErrorKind::ConditionTooHigh, os.str());
  }
  return out;
}

// Caches towers and chains per (L, U, k) so that every formula at the same
// parameters sees bit-identical points, the beta chain in particular.
class ChainWorkbench {
 public:
  ChainWorkbench(const ladder::LadderModel& model, TowerLimits limits = {}, ChainOptions options = {})
      : model_(&model), limits_(limits), options_(options) {}

  const ladder::LadderModel& model() const { return *model_; }
  const TowerLimits& limits() const { return limits_; }
  const ChainOptions& options() const { return options_; }

  IterationTower tower(int L, double U, int k) {
    std::lock_guard lock(mutex_);
    return tower_locked(L, U, k);
  }

  ChainPoints chain(int L, double U, int k, const FunctionFamily& f) {
    const Key key{L, U, k, f};
    {
      std::lock_guard lock(mutex_);
      if (auto it = chains_.find(key); it != chains_.end()) return it->second;
    }
    const IterationTower t = tower(L, U, k);
    ChainPoints solved = solve_chain(*model_, f, t, options_);
    std::lock_guard lock(mutex_);
    return chains_.try_emplace(key, std::move(solved)).first->second;
  }

  ChainPoints beta(int L, double U, int k) { return chain(L, U, k, FunctionFamily::one()); }

  ChainSet chain_set(int L, double U, int k, const std::vector<FunctionFamily>& families) {
    ChainSet set;
    set.tower = tower(L, U, k);
    std::vector<std::future<ChainPoints>> pending;
    for (const auto& f : families) {
      pending.push_back(std::async(std::launch::async, [this, L, U, k, f] { return chain(L, U, k, f); }));
    }
    set.beta = beta(L, U, k);
    for (std::size_t i = 0; i < families.size(); ++i) set.chains.emplace(families[i], pending[i].get());
    return set;
  }

 private:
  using Key = std::tuple<int, double, int, FunctionFamily>;

  // Towers are built once at the deepest requested k; shallower towers are
  // prefixes, so their segments agree bit for bit.
  IterationTower tower_locked(int L, double U, int k) {
    const std::pair<int, double> key{L, U};
    auto it = towers_.find(key);
    if (it == towers_.end() || it->second.k < k) {
      IterationTower built = build_tower(*model_, L, U, k, limits_);
      it = towers_.insert_or_assign(key, std::move(built)).first;
    }
    IterationTower out = it->second;
    out.k = k;
    out.segments.resize(static_cast<std::size_t>(k) + 1);
    return out;
  }

  const ladder::LadderModel* model_;
  TowerLimits limits_;
  ChainOptions options_;
  std::mutex mutex_;
  std::map<std::pair<int, double>, IterationTower> towers_;
  std::map<Key, ChainPoints> chains_;
};

}  // namespace jladder::tower
