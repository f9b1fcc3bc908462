"""Independent arbitrary-precision reference values for the test suites.

Run:  python3 generate_oracles.py > ../oracle_values.hpp
Requires mpmath. Values are frozen into the header; the C++ tests never
call back into this script.
"""
import random

import mpmath as mp

mp.mp.dps = 40


def f(x):
    return mp.nstr(x, 20, min_fixed=-30, max_fixed=30)


def main():
    out = []
    w = out.append
    w("// Generated by tests/oracle/generate_oracles.py (mpmath %s). Do not edit." % mp.__version__)
    w("#pragma once")
    w("")
    w("#include <array>")
    w("")
    w("namespace oracle {")
    w("")
    w("struct HeightValue {")
    w("  double t;")
    w("  double value;")
    w("};")
    w("")

    idx = [1, 2, 3, 10, 100, 500, 1000, 2000, 5000, 10000]
    zeros = [mp.im(mp.zetazero(n)) for n in idx]
    w("// Imaginary parts of nontrivial zeta zeros #%s." % ", #".join(map(str, idx)))
    w("inline constexpr std::array<double, %d> kZetaZeros = {" % len(zeros))
    for z in zeros:
        w("    %s," % f(z))
    w("};")
    w("")

    w("// First Gram point g0: theta(g0) = 0.")
    w("inline constexpr double kGram0 = %s;" % f(mp.grampoint(0)))
    w("")

    w("// Riemann-Siegel theta at selected heights.")
    thetas = [2.0, 5.0, 9.5, 10.0, 30.0, 100.0, 1000.0, 8000.0]
    w("inline constexpr std::array<HeightValue, %d> kTheta = {{" % len(thetas))
    for t in thetas:
        w("    {%s, %s}," % (f(t), f(mp.siegeltheta(t))))
    w("}};")
    w("")

    w("// Hardy Z at selected heights.")
    zs = [0.5, 3.0, 8.0, 12.0, 20.0, 35.0, 60.0, 99.0, 101.0, 250.0, 1000.0, 4321.5, 9876.0]
    w("inline constexpr std::array<HeightValue, %d> kHardyZ = {{" % len(zs))
    for t in zs:
        w("    {%s, %s}," % (f(t), f(mp.siegelz(t))))
    w("}};")
    w("")

    rng = random.Random(20261016)
    heights = sorted(rng.uniform(10.0, 10000.0) for _ in range(20))
    w("// |zeta(1/2+it)|^2 at 20 seeded uniform heights in [10, 1e4].")
    w("inline constexpr std::array<HeightValue, 20> kZetaModSq = {{")
    for t in heights:
        t = mp.mpf(float(t))
        w("    {%s, %s}," % (f(t), f(abs(mp.zeta(mp.mpf(0.5) + 1j * t)) ** 2)))
    w("}};")
    w("")

    w("// |zeta(1/2+1000i)|^2")
    w("inline constexpr double kZetaModSq1000 = %s;" % f(abs(mp.zeta(mp.mpf(0.5) + 1000j)) ** 2))
    w("")

    mp.mp.dps = 20
    grid = mp.linspace(0, 100, 801)
    a100 = mp.quad(lambda u: mp.siegelz(u) ** 2, grid)
    w("// Integral of Z(u)^2 over [0, 100].")
    w("inline constexpr double kHardyLittlewood100 = %s;" % f(a100))
    w("")
    w("}  // namespace oracle")
    print("\n".join(out))


if __name__ == "__main__":
    main()
