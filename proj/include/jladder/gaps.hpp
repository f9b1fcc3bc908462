#pragma once

// Gaps between consecutive tower components against (1 - c) pi(piL).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "jladder/error.hpp"
#include "jladder/ladder.hpp"
#include "jladder/tower.hpp"

namespace jladder::gaps {

inline constexpr double kSieveLimit = 1e8;

namespace detail {

// Primes up to a bound that only ever grows; shared by all callers.
class PrimeTable {
 public:
  std::uint64_t count_upto(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    if (n > limit_) grow(std::max<std::uint64_t>(n, 2 * limit_));
    return static_cast<std::uint64_t>(std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
  }

 private:
  void grow(std::uint64_t n) {
    n = std::min<std::uint64_t>(n, static_cast<std::uint64_t>(kSieveLimit));
    std::vector<bool> composite(n + 1, false);
    primes_.clear();
    for (std::uint64_t i = 2; i <= n; ++i) {
      if (composite[i]) continue;
      primes_.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    limit_ = n;
  }

  std::mutex mutex_;
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
};

inline PrimeTable& prime_table() {
  static PrimeTable table;
  return table;
}

}  // namespace detail

// Number of primes <= x.
inline std::uint64_t prime_pi(double x) {
  if (std::isnan(x)) throw Error(ErrorKind::InvalidArgument, "prime_pi of NaN");
  if (x > kSieveLimit) {
    std::ostringstream os;
    os << "prime_pi(" << x << ") exceeds the sieve bound " << kSieveLimit;
    throw Error(ErrorKind::RangeTooLarge, os.str());
  }
  if (x < 2.0) return 0;
  return detail::prime_table().count_upto(static_cast<std::uint64_t>(std::floor(x)));
}

// Offset logarithmic integral Li(x) = li(x) - li(2).
inline double offset_li(double x) {
  if (!(x >= 2.0)) throw Error(ErrorKind::InvalidArgument, "offset_li needs x >= 2");
  return boost::math::expint(std::log(x)) - boost::math::expint(std::log(2.0));
}

struct GapReport {
  int L = 0;
  double U = 0.0;
  int r = 0;
  double rho = 0.0;
  double predicted = 0.0;     // (1 - c) pi(piL)
  double ratio = 0.0;
  double predicted_li = 0.0;  // (1 - c) Li(piL)
};

// Distance between tower components r and r + 1.
inline GapReport gap_rho(const tower::IterationTower& tw, int r) {
  if (r < 0 || r + 1 > tw.k) {
    std::ostringstream os;
    os << "gap index r = " << r << " needs r + 1 <= k = " << tw.k;
    throw Error(ErrorKind::IndexOutOfTower, os.str());
  }
  const auto& lower = tw.segments[static_cast<std::size_t>(r)];
  const auto& upper = tw.segments[static_cast<std::size_t>(r) + 1];
  const double x = tw.base_lo();
  const double one_minus_c = 1.0 - ladder::Constants::euler_c;
  GapReport out;
  out.L = tw.L;
  out.U = tw.U;
  out.r = r;
  out.rho = upper.lo - lower.hi;
  out.predicted = one_minus_c * static_cast<double>(prime_pi(x));
  out.ratio = out.rho / out.predicted;
  out.predicted_li = one_minus_c * offset_li(x);
  return out;
}

inline void write_csv_header(std::ostream& os) { os << "L,U,r,rho,predicted,ratio,predicted_li\n"; }

inline void write_csv_row(std::ostream& os, const GapReport& g) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n", g.L, g.U, g.r, g.rho, g.predicted,
                g.ratio, g.predicted_li);
  os << buf;
}

}  // namespace jladder::gaps
