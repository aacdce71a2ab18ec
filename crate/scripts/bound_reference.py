"""Arbitrary-precision reference for the exclusion bound.

Evaluates every factor of the bound from scratch with mpmath (40 digits) and
prints the values the Rust tests freeze. Run: python3 scripts/bound_reference.py
"""

from mpmath import exp, mp, mpf, pi, sqrt

mp.dps = 40

hbar = mpf("1.054571817e-34")
c = mpf(299792458)
mu0 = mpf("1.25663706212e-6")
mu_b = mpf("9.27e-24")
g_s = mpf(2)
nu = g_s * mu_b / hbar

radius = mpf("5e-7")
gap = mpf("8e-8")
thickness = mpf("5e-8")
rho = mpf("1.62e24")
pol = mpf("0.1")
omega_r = mpf("2e6")
mass = mpf("1e-15")
g_c = mpf("0.3")


def u1(lam):
    far = gap + thickness
    return (
        exp(-sqrt(radius**2 + gap**2) / lam)
        + exp(-far / lam)
        - exp(-sqrt(radius**2 + far**2) / lam)
        - exp(-gap / lam)
    )


u2 = 1 / (radius**2 + gap**2) ** mpf("1.5") - 1 / (radius**2 + (gap + thickness) ** 2) ** mpf("1.5")
spin = pol * g_s * mu_b * rho
numerator = g_c * sqrt(2 * mass * omega_r * hbar) * nu + spin * u2 * radius**2 / 4 * mu0 * nu**2 * hbar


def bound(lam):
    return -numerator / (4 * pi * lam * u1(lam) * spin * c)


if __name__ == "__main__":
    print("nu", mp.nstr(nu, 17))
    print("u2", mp.nstr(u2, 17))
    print("u1(1e-7)", mp.nstr(u1(mpf("1e-7")), 17))
    for lam in ["1e-8", "1e-7", "2e-7", "1e-6", "1e-4", "1e-2", "1e-1"]:
        print("bound", lam, mp.nstr(bound(mpf(lam)), 17))
    far = gap + thickness
    plateau = gap + sqrt(radius**2 + far**2) - far - sqrt(radius**2 + gap**2)
    print("asymptote", mp.nstr(-numerator / (4 * pi * plateau * spin * c), 17))
