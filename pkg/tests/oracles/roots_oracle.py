"""Brute-force root finding for the group-velocity quadratic."""

import mpmath as mp
import numpy as np


def quadratic(v, lam, beta, gamma_bc, sigma, c):
    return v * v - (beta + lam + sigma * c) / sigma * v + (lam * sigma * c + beta * gamma_bc) / sigma**2


def scan_roots(lam, beta, gamma_bc, sigma, c, v_max, n=200001, dps=40):
    """Sign changes on a uniform grid over (0, v_max], polished by bisection in mpmath."""
    grid = np.linspace(v_max / n, v_max, n)
    vals = quadratic(grid, lam, beta, gamma_bc, sigma, c)
    roots = []
    with mp.workdps(dps):
        f = lambda v: quadratic(v, mp.mpf(lam), mp.mpf(beta), mp.mpf(gamma_bc), mp.mpf(sigma), mp.mpf(c))  # noqa: E731
        for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
            roots.append(float(mp.findroot(f, (mp.mpf(grid[i]), mp.mpf(grid[i + 1])), solver="bisect")))
    return sorted(roots)


def poly_roots(coeffs, dps=40):
    with mp.workdps(dps):
        return [complex(r) for r in mp.polyroots([mp.mpc(c) for c in coeffs], maxsteps=200, extraprec=100)]


def monic_roots(b, c, dps=50):
    """Closed-form roots of x^2 + b x + c in mpmath (no exponent range limits)."""
    with mp.workdps(dps):
        b, c = mp.mpc(b), mp.mpc(c)
        d = mp.sqrt(b * b - 4 * c)
        return [complex((-b + d) / 2), complex((-b - d) / 2)]
