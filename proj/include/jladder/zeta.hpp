#pragma once

// Critical-line evaluation: Riemann-Siegel theta, Hardy's Z and |zeta(1/2+it)|^2.
//
// Heights at or above ZetaOptions::rs_floor use the Riemann-Siegel formula
// with up to five correction terms C0..C4. Lower heights go through the
// alternating (eta) series with Borwein's acceleration, which is accurate to
// rounding there and keeps Z(t) available down to t = 0 for cumulative
// integrals.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "jladder/error.hpp"

namespace jladder::zeta {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ZSample {
  double t = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double err_bound = 0.0;
};

struct ZetaOptions {
  // Number of Riemann-Siegel correction terms beyond C0, in [0, 4].
  int rs_depth = 4;
  // Heights below this use the accelerated eta series.
  double rs_floor = 200.0;

  void validate() const {
    if (rs_depth < 0 || rs_depth > 4) {
      throw Error(ErrorKind::InvalidArgument, "rs_depth must lie in [0, 4]");
    }
    if (!(rs_floor >= 10.0 && rs_floor <= 300.0)) {
      throw Error(ErrorKind::InvalidArgument, "rs_floor must lie in [10, 300]");
    }
  }
};

namespace detail {

// Taylor coefficients of C0..C4 in z = 1 - 2p, p the fractional part of
// sqrt(t / 2pi). Even terms have only even powers, odd terms only odd powers.
// Generated by tests/oracle/rs_coefficients.py.
inline const std::array<std::vector<double>, 5>& rs_coefficients() {
  static const std::array<std::vector<double>, 5> table = {{
    // C0, coefficients of z^0, z^2, ...
    {
        0.38268343236508977173, 0.43724046807752044936, 0.13237657548034352332,
        -0.013605026047674188655, -0.013567621970103580888, -0.0016237253231444652829,
        0.00029705353733379690783, 0.00007943300879521469588, 0.00000046556124614504505037,
        -0.0000014327251630955105754, -0.00000010354847112312946075,
        0.000000012357927083861738056, 0.0000000017881083857954904986,
        -0.000000000033914143899270359069, -0.000000000016326633902565905101,
        -0.00000000000037851093185412203829, 0.000000000000093274232592017248457,
        0.0000000000000052218430159781368553, -0.00000000000000033506730727442637895,
        -0.000000000000000034124265228117264941,
    },
    // C1, coefficients of z^1, z^3, ...
    {
        0.02682510262837534703, -0.01378477342635185305, -0.038491250482235082229,
        -0.009871066299062076472, 0.0033107597608584043329, 0.0014647808577954150825,
        0.000013207940624876963675, -0.000059227487018471413232, -0.0000059802425853734485877,
        0.00000096413224561698263527, 0.0000001833473372271441176,
        -0.0000000044670875627178335996, -0.0000000027096350821772743217,
        -0.000000000077852886543158510463, 0.000000000023437626010893688532,
        0.0000000000015830172789987521642, -0.00000000000012119941573723791247,
        -0.000000000000014583781161108307018, 0.00000000000000028786305258131917505,
        0.000000000000000086628629021237241225,
    },
    // C2, coefficients of z^0, z^2, ...
    {
        0.0051885428302931684938, 0.00030946583880634746033, -0.011335941078229373382,
        0.0022330457419581447721, 0.0051966374088623302051, 0.00034399144076208336695,
        -0.00059106484274705828217, -0.00010229972547935857454, 0.000020888392216992755408,
        0.0000059276654930965359579, -0.00000016423838362436275978,
        -0.00000015161199700940682862, -0.0000000059078036982066679629,
        0.0000000020911514859478188978, 0.00000000017815649583292351054,
        -0.000000000016164072455353830753, -0.0000000000023806962496667615707,
        0.000000000000053982652955425949182, 0.000000000000019750142196969515273,
        0.00000000000000023332868732882634831,
    },
    // C3, coefficients of z^1, z^3, ...
    {
        0.0013397160907194569043, -0.0037442151363793937047, 0.001330317891932146812,
        0.0022654660765471787115, -0.00095484999985067304151, -0.00060100384589636039121,
        0.00010128858286776621953, 0.000068657334492998256425, -0.00000059853667915385981593,
        -0.000003331659851239947129, -0.00000021919289102435081057,
        0.000000078908842456814944106, 0.0000000094146850812952621517,
        -0.00000000095701162108834803019, -0.00000000018763137453470662797,
        0.0000000000044378376793233993275, 0.0000000000022426738505617353248,
        0.000000000000036276868657352436894, -0.000000000000017639809550821581608,
        -0.00000000000000079607652467867777573,
    },
    // C4, coefficients of z^0, z^2, ...
    {
        0.00046483389361763381854, -0.001005660736534047076, 0.00024044856573725793022,
        0.0010283086149702321878, -0.00076578610717556441866, -0.00020365286803084817621,
        0.00023212290491068727895, 0.000032602144243865197608, -0.00002557906251794952514,
        -0.000004107464438915744754, 0.0000011781113640371293881, 0.00000024456561422484578542,
        -0.00000002391582476734432243, -0.0000000075052142070357552885,
        0.00000000013312279416258428193, 0.00000000013440626754225619719,
        0.0000000000035137700424304859287, -0.0000000000015191544533703919336,
        -0.000000000000089154176814470873055, 0.000000000000011195891165228535773,
    },
  }};
  return table;
}

inline double rs_correction(int k, double z) {
  const auto& c = rs_coefficients()[static_cast<std::size_t>(k)];
  const double z2 = z * z;
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z2 + *it;
  return (k % 2 == 1) ? acc * z : acc;
}

// Remainder bounds for t >= 200 after including C0..C_depth.
inline double rs_remainder_bound(int depth, double t) {
  static constexpr std::array<double, 5> kScale = {0.127, 0.053, 0.011, 0.031, 0.017};
  return kScale[static_cast<std::size_t>(depth)] * std::pow(t, -0.75 - 0.5 * depth);
}

struct DirichletTables {
  std::vector<double> log_n;
  std::vector<double> inv_sqrt_n;
};

inline const DirichletTables& dirichlet_tables() {
  static const DirichletTables tables = [] {
    constexpr std::size_t kSize = 4096;
    DirichletTables d;
    d.log_n.resize(kSize + 1);
    d.inv_sqrt_n.resize(kSize + 1);
    for (std::size_t n = 1; n <= kSize; ++n) {
      d.log_n[n] = std::log(static_cast<double>(n));
      d.inv_sqrt_n[n] = 1.0 / std::sqrt(static_cast<double>(n));
    }
    return d;
  }();
  return tables;
}

// log Gamma(z) on the continuous branch, Re z > 0.
inline std::complex<double> log_gamma(std::complex<double> z) {
  constexpr int kShift = 12;
  std::complex<double> shift_sum{0.0, 0.0};
  for (int k = 0; k < kShift; ++k) shift_sum += std::log(z + static_cast<double>(k));
  const std::complex<double> w = z + static_cast<double>(kShift);
  const std::complex<double> inv = 1.0 / w;
  const std::complex<double> inv2 = inv * inv;
  // Stirling series through the w^-13 term.
  const std::complex<double> series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(kTwoPi) + series - shift_sum;
}

// Terms used by the eta series at height t, sized for double precision.
inline int eta_terms(double t) {
  const double need = std::log(3.0 * (1.0 + 2.0 * t)) + 0.5 * kPi * t + 37.0;
  return static_cast<int>(std::ceil(need / std::log(3.0 + 2.0 * std::numbers::sqrt2))) + 1;
}

}  // namespace detail

// Riemann-Siegel theta. Asymptotic series for t >= 10, log-gamma below.
inline double rs_theta(double t) {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "rs_theta requires t >= 0, got " << t;
    throw Error(ErrorKind::DomainTooSmall, os.str());
  }
  if (t < 10.0) {
    const auto lg = detail::log_gamma({0.25, 0.5 * t});
    return lg.imag() - 0.5 * t * std::log(kPi);
  }
  const double inv = 1.0 / t;
  const double inv2 = inv * inv;
  const double tail =
      inv * (1.0 / 48.0 +
             inv2 * (7.0 / 5760.0 +
                     inv2 * (31.0 / 80640.0 +
                             inv2 * (127.0 / 430080.0 + inv2 * (511.0 / 1216512.0)))));
  return 0.5 * t * std::log(t / kTwoPi) - 0.5 * t - 0.125 * kPi + tail;
}

// zeta(1/2 + it) from the alternating series, Borwein acceleration.
// Valid (and sized) for 0 <= t <= 300.
inline std::complex<double> zeta_critical_eta(double t, double* err_bound = nullptr) {
  if (!(t >= 0.0 && t <= 300.0)) {
    throw Error(ErrorKind::InvalidArgument, "eta series evaluation is limited to 0 <= t <= 300");
  }
  const int n = detail::eta_terms(t);
  std::vector<double> d(static_cast<std::size_t>(n) + 1);
  double term = 1.0 / n;
  double acc = term;
  d[0] = n * acc;
  for (int i = 0; i < n; ++i) {
    term *= 4.0 * static_cast<double>(n + i) * static_cast<double>(n - i) /
            (static_cast<double>(2 * i + 1) * static_cast<double>(2 * i + 2));
    acc += term;
    d[static_cast<std::size_t>(i) + 1] = n * acc;
  }
  const double dn = d[static_cast<std::size_t>(n)];
  std::complex<double> sum{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const double lk = std::log(static_cast<double>(k + 1));
    const double mag = (d[static_cast<std::size_t>(k)] - dn) / dn / std::sqrt(static_cast<double>(k + 1));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * mag * std::polar(1.0, -t * lk);
  }
  const std::complex<double> eta = -sum;
  const std::complex<double> s{0.5, t};
  const std::complex<double> factor = 1.0 - std::exp((1.0 - s) * std::log(2.0));
  if (err_bound != nullptr) {
    const double trunc = 3.0 * (1.0 + 2.0 * t) * std::exp(0.5 * kPi * t) /
                         std::pow(3.0 + 2.0 * std::numbers::sqrt2, n);
    *err_bound = (trunc + 64.0 * n * 2.2e-16) / std::abs(factor);
  }
  return eta / factor;
}

// Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t.
inline ZSample hardy_z(double t, const ZetaOptions& options = {}) {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "hardy_z requires t >= 0, got " << t;
    throw Error(ErrorKind::DomainTooSmall, os.str());
  }
  const double theta = rs_theta(t);
  if (t < options.rs_floor) {
    double bound = 0.0;
    const auto zeta = zeta_critical_eta(t, &bound);
    const auto rotated = std::polar(1.0, theta) * zeta;
    return ZSample{t, rotated.real(), theta, bound + 1e-13};
  }

  const double a = std::sqrt(t / kTwoPi);
  const auto n_max = static_cast<std::size_t>(a);
  const auto& tab = detail::dirichlet_tables();
  double main_sum = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const bool cached = n < tab.log_n.size();
    const double ln_n = cached ? tab.log_n[n] : std::log(static_cast<double>(n));
    const double w = cached ? tab.inv_sqrt_n[n] : 1.0 / std::sqrt(static_cast<double>(n));
    main_sum += w * std::cos(theta - t * ln_n);
  }
  main_sum *= 2.0;

  const double p = a - static_cast<double>(n_max);
  const double z = 1.0 - 2.0 * p;
  double correction = 0.0;
  double a_pow = 1.0;
  for (int k = 0; k <= options.rs_depth; ++k) {
    correction += detail::rs_correction(k, z) * a_pow;
    a_pow /= a;
  }
  const double sign = (n_max % 2 == 1) ? 1.0 : -1.0;
  const double value = main_sum + sign * correction / std::sqrt(a);

  const double rounding = 4.0 * 2.2e-16 * (std::abs(theta) + t * std::log(a + 1.0)) *
                          2.0 * std::sqrt(static_cast<double>(n_max));
  return ZSample{t, value, theta, detail::rs_remainder_bound(options.rs_depth, t) + rounding};
}

// |zeta(1/2 + it)|^2, which is Z(t)^2 by definition.
inline double zeta_mod_sq(double t, const ZetaOptions& options = {}) {
  const double z = hardy_z(t, options).z;
  return z * z;
}

}  // namespace jladder::zeta
