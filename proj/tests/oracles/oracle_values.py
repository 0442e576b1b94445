"""Reference values computed at 50 digits with mpmath.

Writes frozen_values.hpp next to this script. Run once; the C++ tests
compare against the frozen numbers.
"""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

CASES = {
    "light_load": dict(R=1, L=mp.mpf("0.25e-3"), C=mp.mpf("100e-6"), Vdc=100, T=mp.mpf("1200e-6")),
    "damped": dict(R=20, L=mp.mpf("10e-3"), C=mp.mpf("100e-6"), Vdc=100, T=mp.mpf("250e-5")),
    "nominal": dict(R=2, L=mp.mpf("10e-3"), C=mp.mpf("100e-6"), Vdc=100, T=mp.mpf("800e-5")),
    "nominal_t400": dict(R=2, L=mp.mpf("10e-3"), C=mp.mpf("100e-6"), Vdc=100, T=mp.mpf("400e-5")),
    "nominal_t1600": dict(R=2, L=mp.mpf("10e-3"), C=mp.mpf("100e-6"), Vdc=100, T=mp.mpf("1600e-5")),
    "overdamped": dict(R=10, L=1, C=10, Vdc=50, T=2),
    "repeated": dict(R=2, L=1, C=1, Vdc=10, T=2),
    "stiff": dict(R=300, L=mp.mpf("1e-3"), C=mp.mpf("1e-3"), Vdc=700, T=mp.mpf("0.5")),
}


def analyze(R, L, C, Vdc, T):
    R, L, C, Vdc, T = (mp.mpf(x) for x in (R, L, C, Vdc, T))
    h = T / 2
    A1 = mp.matrix([[-R / L, -1 / L], [1 / C, 0]])
    A2 = mp.matrix([[-R / L, 1 / L], [-1 / C, 0]])
    b1 = mp.matrix([Vdc / L, 0])
    E1 = mp.expm(h * A1)
    E2 = mp.expm(h * A2)
    M = E2 * E1
    N = E2 * mp.inverse(A1) * (E1 - mp.eye(2))
    x0 = mp.lu_solve(mp.eye(2) - M, N * b1)
    xh = E1 * x0 + mp.inverse(A1) * (E1 - mp.eye(2)) * b1
    alpha = -(M[0, 0] + M[1, 1])
    beta = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    disc = alpha**2 / 4 - beta
    if disc >= 0:
        rho = max(abs(-alpha / 2 + mp.sqrt(disc)), abs(-alpha / 2 - mp.sqrt(disc)))
    else:
        rho = mp.sqrt(beta)
    i_avg = 2 * C / T * (Vdc - 2 * x0[1])
    return dict(i0=x0[0], v0=x0[1], ih=xh[0], vh=xh[1], alpha=alpha, beta=beta, rho=rho, i_avg=i_avg)


def main():
    lines = [
        "#pragma once",
        "",
        "// Generated by oracle_values.py (mpmath, 50 digits). Do not edit.",
        "",
        "namespace oracle {",
        "",
        "struct Case {",
        "  const char* name;",
        "  double R, L, C, Vdc, T;",
        "  double i0, v0, ih, vh, alpha, beta, rho, i_avg;",
        "};",
        "",
        "inline constexpr Case kCases[] = {",
    ]
    for name, p in CASES.items():
        r = analyze(**p)
        params = ", ".join(mp.nstr(mp.mpf(p[k]), 17) for k in ("R", "L", "C", "Vdc", "T"))
        values = ", ".join(mp.nstr(r[k], 17) for k in ("i0", "v0", "ih", "vh", "alpha", "beta", "rho", "i_avg"))
        lines.append(f'    {{"{name}", {params},')
        lines.append(f"     {values}}},")
    lines += ["};", "", "}  // namespace oracle", ""]
    Path(__file__).with_name("frozen_values.hpp").write_text("\n".join(lines))


if __name__ == "__main__":
    main()
