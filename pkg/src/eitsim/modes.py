"""Analytic probe modes in a homogeneous EIT medium.

A probe of the travelling form f(r - k_hat v_g t) with constant v_g obeys

    d^2 Omega/dt^2 + zeta dOmega/dt + varsigma Omega = 0,
    zeta = lam + beta / (1 - c/v_g),   varsigma = beta gamma_bc / (1 - c/v_g),

whose solutions are Omega_+ exp(eta_+ t) + Omega_- exp(eta_- t) with spatial
profile exp(sigma k_hat . r).  Matching the travelling form gives
v_g = -eta/sigma and a quadratic for v_g,

    v^2 - ((beta + lam + sigma c)/sigma) v + (lam sigma c + beta gamma_bc)/sigma^2 = 0.

The physical (subluminal) root is kept.  Which eta branch reproduces it is
measured, not assumed, and reported on :class:`ProbeModeCoefficients`.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import NoPhysicalModeError, ParameterError, PoleError, RegimeWarning
from .params import AtomParams, DerivedRates, FieldParams

SLOW_LIGHT_RATIO_MIN = 25.0


def stable_quadratic_roots(a, b, c):
    """Both roots of a x^2 + b x + c = 0 without cancellation.

    Works for real or complex coefficients.  The equation is first made
    monic and rescaled by an exact power of two so the coefficients are of
    order one, which keeps b^2 and 4c from under- or overflowing.  The
    larger-magnitude root comes from the sign-matched branch
    q = -(b + s sqrt(b^2 - 4c))/2 and the other from c/q.  Returns
    ``(big, small, s)`` with s the sign used against the principal square
    root.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0:
        raise ParameterError("leading coefficient is zero")
    b, c = b / a, c / a
    size = max(abs(b), math.sqrt(abs(c)))
    if size == 0:
        return 0j, 0j, 1.0
    scale = math.ldexp(1.0, math.frexp(size)[1])
    b, c = b / scale, c / scale / scale
    d = cmath.sqrt(b * b - 4 * c)
    s = 1.0 if (b.conjugate() * d).real >= 0 else -1.0
    q = -0.5 * (b + s * d)
    if q == 0:
        return 0j, 0j, s
    return q * scale, (c / q) * scale, s


def envelope_coefficients(rates: DerivedRates, atom: AtomParams, v_g: float) -> tuple[complex, complex]:
    """zeta and varsigma for a constant group velocity ``v_g``."""
    if v_g == 0:
        raise PoleError("v_g = 0: c/v_g is undefined")
    denom = 1.0 - atom.c / v_g
    if denom == 0:
        raise PoleError("v_g = c: 1 - c/v_g vanishes")
    zeta = complex(rates.lam + rates.beta / denom)
    varsigma = complex(rates.beta * atom.gamma_bc / denom)
    return zeta, varsigma


def characteristic_roots(zeta: complex, varsigma: complex) -> tuple[complex, complex]:
    """eta_+/- = (-zeta +/- sqrt(zeta^2 - 4 varsigma))/2 with the principal square root.

    The labels follow the principal branch; numerically the root of larger
    magnitude is computed directly and the other from the product
    eta_+ eta_- = varsigma.
    """
    zeta, varsigma = complex(zeta), complex(varsigma)
    big, small, s = stable_quadratic_roots(1.0, zeta, varsigma)
    if big == 0 and small == 0:
        return 0j, 0j
    # big = -(zeta + s d)/2: it is eta_- when s = +1, eta_+ when s = -1
    if s > 0:
        return small, big
    return big, small


def group_velocity_roots(rates: DerivedRates, atom: AtomParams, sigma: float) -> tuple[complex, complex] | tuple[float, float]:
    """Both roots (v_+, v_-) of the group-velocity quadratic, v_+ >= v_- when real.

    Complex roots are returned as complex numbers with a RegimeWarning.
    """
    if sigma == 0:
        raise ParameterError("sigma must be non-zero")
    lam, beta, c = rates.lam, rates.beta, atom.c
    b = -(beta + lam + sigma * c) / sigma
    c0 = (lam * sigma * c + beta * atom.gamma_bc) / sigma**2
    disc = b * b - 4 * c0
    if disc < 0:
        warnings.warn(
            f"group-velocity quadratic has complex roots (discriminant {disc:.3g})",
            RegimeWarning,
            stacklevel=2,
        )
        r1, r2, _ = stable_quadratic_roots(1.0, b, c0)
        return (r1, r2) if r1.imag >= r2.imag else (r2, r1)
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0:
        return 0.0, 0.0
    r1, r2 = q, c0 / q
    return (r1, r2) if r1 >= r2 else (r2, r1)


def quadratic_residual(v, rates: DerivedRates, atom: AtomParams, sigma: float) -> float:
    """Relative residual of ``v`` in the group-velocity quadratic."""
    b = (rates.beta + rates.lam + sigma * atom.c) / sigma
    c0 = (rates.lam * sigma * atom.c + rates.beta * atom.gamma_bc) / sigma**2
    num = abs(v * v - b * v + c0)
    den = abs(v) ** 2 + abs(b * v) + abs(c0)
    return num / den if den else 0.0


def select_group_velocity(v_plus, v_minus, c: float) -> float:
    """Return the smallest real root strictly inside (0, c).

    Raises
    ------
    NoPhysicalModeError
        If no root is real and subluminal.
    """
    candidates = []
    for v in (v_plus, v_minus):
        v = complex(v)
        if v.imag == 0 and 0.0 < v.real < c:
            candidates.append(v.real)
    if not candidates:
        raise NoPhysicalModeError(f"no real group velocity in (0, c): roots {v_plus!r}, {v_minus!r}")
    return min(candidates)


@dataclass(frozen=True)
class ProbeModeCoefficients:
    """Scalars defining the analytic probe solution at the selected v_g.

    ``branch`` names the eta root that satisfies -eta/sigma = v_g
    ("eta_plus" or "eta_minus") and ``branch_mismatch`` its relative
    residual.  ``growing`` flags a root with positive real part.
    """

    zeta: complex
    varsigma: complex
    eta_plus: complex
    eta_minus: complex
    sigma: float
    v_g: float
    v_g_plus: complex
    v_g_minus: complex
    k_hat_p: tuple
    branch: str
    branch_mismatch: float
    growing: bool


def solve_probe_modes(rates: DerivedRates, atom: AtomParams, field: FieldParams) -> ProbeModeCoefficients:
    """Assemble the analytic mode at the physical group velocity."""
    if field.sigma is None:
        raise ParameterError("field.sigma is required for the analytic probe modes")
    sigma = field.sigma
    v_plus, v_minus = group_velocity_roots(rates, atom, sigma)
    v_g = select_group_velocity(v_plus, v_minus, atom.c)
    zeta, varsigma = envelope_coefficients(rates, atom, v_g)
    eta_p, eta_m = characteristic_roots(zeta, varsigma)
    target = -sigma * v_g
    mism = {
        "eta_plus": abs(eta_p - target) / abs(target),
        "eta_minus": abs(eta_m - target) / abs(target),
    }
    branch = min(mism, key=mism.get)
    return ProbeModeCoefficients(
        zeta=zeta,
        varsigma=varsigma,
        eta_plus=eta_p,
        eta_minus=eta_m,
        sigma=sigma,
        v_g=v_g,
        v_g_plus=v_plus,
        v_g_minus=v_minus,
        k_hat_p=field.k_hat_p,
        branch=branch,
        branch_mismatch=mism[branch],
        growing=bool(eta_p.real > 0 or eta_m.real > 0),
    )


class SlowLightEstimate(NamedTuple):
    intermediate: float  # (lam sigma c + beta gamma_bc) / (sigma (beta + lam + sigma c))
    final: float  # |Omega_c|^2 c / (2 omega_p kappa + |Omega_c|^2)
    dominance_ratio: float  # (beta + lam + sigma c)^2 / (4 (lam sigma c + beta gamma_bc))


def slow_light_vg(rates: DerivedRates, atom: AtomParams, field: FieldParams) -> SlowLightEstimate:
    """Asymptotic slow-light group velocity.

    Both the small-discriminant expansion of the subluminal root and its
    sigma-independent limit are returned.  Warns when the dominance ratio is
    below 25, where the expansion is marginal.
    """
    oc2 = abs(field.omega_c_rabi) ** 2
    final_den = 2.0 * atom.omega_p * atom.kappa + oc2
    final = oc2 * atom.c / final_den if final_den else atom.c
    sigma = field.sigma
    if sigma is None:
        return SlowLightEstimate(math.nan, final, math.nan)
    lam, beta, c = rates.lam, rates.beta, atom.c
    s = beta + lam + sigma * c
    p = lam * sigma * c + beta * atom.gamma_bc
    intermediate = p / (sigma * s)
    ratio = s * s / (4.0 * p) if p else math.inf
    if ratio < SLOW_LIGHT_RATIO_MIN:
        warnings.warn(
            f"slow-light expansion is marginal: dominance ratio {ratio:.3g} < {SLOW_LIGHT_RATIO_MIN}",
            RegimeWarning,
            stacklevel=2,
        )
    return SlowLightEstimate(intermediate, final, ratio)


def mode_envelope(mode: ProbeModeCoefficients, amp_plus: complex, amp_minus: complex, position, t):
    """Omega_p(r, t) = sum over +/- of amp exp(sigma k_hat . (r - k_hat (-eta/sigma) t)).

    ``position`` has shape ``(..., 3)`` (or the dimension of ``k_hat_p``);
    ``t`` broadcasts against the leading shape.
    """
    k = np.asarray(mode.k_hat_p, dtype=float)
    r = np.asarray(position, dtype=float)
    t = np.asarray(t, dtype=float)
    kk = float(k @ k)
    kr = r @ k
    out = 0j
    for amp, eta in ((amp_plus, mode.eta_plus), (amp_minus, mode.eta_minus)):
        if amp == 0:
            continue
        speed = -eta / mode.sigma
        out = out + amp * np.exp(mode.sigma * (kr - kk * speed * t))
    return out


def transport_identity_check(
    envelope: Callable,
    v_g: float,
    k_hat,
    points,
    times,
    directional_derivative: Optional[Callable] = None,
    time_derivative: Optional[Callable] = None,
    h: float = 1e-4,
) -> float:
    """Residual of k_hat . grad Omega + (1/v_g) dOmega/dt over sample points.

    ``envelope(r, t)`` returns the field at one position and time.  Missing
    derivatives are taken by fourth-order central differences with step
    ``h`` (along ``k_hat`` for the spatial one).  The result is the largest
    residual divided by the largest of |k_hat . grad Omega| and
    |dOmega/dt|/|v_g|, so a field that is not transported at ``v_g`` gives
    O(1).
    """
    k = np.asarray(k_hat, dtype=float)
    if directional_derivative is None:
        def directional_derivative(r, t):
            f = lambda s: envelope(r + s * k, t)  # noqa: E731
            return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)
    if time_derivative is None:
        def time_derivative(r, t):
            f = lambda s: envelope(r, t + s)  # noqa: E731
            return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)
    worst = 0.0
    scale = 0.0
    for r in np.atleast_2d(np.asarray(points, dtype=float)):
        for t in np.atleast_1d(times):
            ds = complex(directional_derivative(r, t))
            dt = complex(time_derivative(r, t))
            worst = max(worst, abs(ds + dt / v_g))
            scale = max(scale, abs(ds), abs(dt / v_g))
    return worst / scale if scale else 0.0
