// Generated by tests/oracle/generate_oracles.py (mpmath 1.3.0). Do not edit.
#pragma once

#include <array>

namespace oracle {

struct HeightValue {
  double t;
  double value;
};

// Imaginary parts of nontrivial zeta zeros #1, #2, #3, #10, #100, #500, #1000, #2000, #5000, #10000.
inline constexpr std::array<double, 10> kZetaZeros = {
    14.13472514173469379,
    21.022039638771554993,
    25.010857580145688763,
    49.773832477672302182,
    236.5242296658162058,
    811.18435884650626034,
    1419.4224809459956865,
    2515.28648292471288,
    5447.8619983012998564,
    9877.7826540055011428,
};

// First Gram point g0: theta(g0) = 0.
inline constexpr double kGram0 = 17.845599540410860817;

// Riemann-Siegel theta at selected heights.
inline constexpr std::array<HeightValue, 8> kTheta = {{
    {2.0, -2.52591091881613269},
    {5.0, -3.4596203753634625332},
    {9.5, -3.1767846988547827074},
    {10.0, -3.0670743962898952917},
    {30.0, 8.0578001365639901994},
    {100.0, 87.972165231787219625},
    {1000.0, 2034.5464280380316087},
    {8000.0, 24596.886320532977932},
}};

// Hardy Z at selected heights.
inline constexpr std::array<HeightValue, 13> kHardyZ = {{
    {0.5, -1.0653492124937794036},
    {3.0, -0.53854713854170720394},
    {8.0, -1.2927653833255392717},
    {12.0, -1.2598888341244722569},
    {20.0, 1.1478424121851972776},
    {35.0, 2.826478611327422481},
    {60.0, 0.58695049071087436762},
    {99.0, 0.58724630263631563446},
    {101.0, 1.0017663332698438828},
    {250.0, -0.91863341835615242705},
    {1000.0, 0.99779463752158661399},
    {4321.5, 1.5853936834723329131},
    {9876.0, -1.2690834807802265427},
}};

// |zeta(1/2+it)|^2 at 20 seeded uniform heights in [10, 1e4].
inline constexpr std::array<HeightValue, 20> kZetaModSq = {{
    {42.240940671124022288, 1.2679133574868598638},
    {540.17274924337243647, 0.0027836299016349564878},
    {623.97230931812646304, 4.4213395481654690785},
    {1342.6525884501670589, 0.15673908338189023868},
    {1750.1630912302400702, 52.666805269025754471},
    {2971.6262301506294534, 5.3711311601772747857},
    {4107.996660337564208, 7.8149659351072716589},
    {4726.2411121710219959, 0.0064662692478679760217},
    {5268.3745029126157533, 0.53642787498208453497},
    {5306.3368506629649346, 0.65721191649636876893},
    {5611.2979828778397859, 4.4382204048303009238},
    {6279.8394914655345929, 1.4816600329752281259},
    {6435.3128499855374685, 26.652722864967334646},
    {6642.7459632905020044, 0.17124241962918318569},
    {7078.0187109799662721, 3.9589875741042625322},
    {7270.7628928869080482, 0.3204580427271232155},
    {7658.2302002373389769, 10.251417582002599876},
    {8118.0766239270978986, 0.023580832196632997173},
    {8927.02424928983055, 8.0976115583515390209},
    {9536.0148389629976009, 3.1685943735128555543},
}};

// |zeta(1/2+1000i)|^2
inline constexpr double kZetaModSq1000 = 0.9955941386668344216;

// Integral of Z(u)^2 over [0, 100].
inline constexpr double kHardyLittlewood100 = 295.63509905471913037;

}  // namespace oracle
