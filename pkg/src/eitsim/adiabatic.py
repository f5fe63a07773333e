"""Adiabatic solutions for the probe and ground-state coherences.

Valid when the coherences follow the fields, |d rho/dt| << |Omega_c|, with
the atoms close to the dark state (rho_bb - rho_aa ~ 1) and rho_ac ~ 0.
The coupling Rabi frequency is taken constant here, so the effective decay
``lam = gamma_bc + |Omega_c|^2/(4 gamma_ab)`` is a constant.

Quadratures are evaluated in the shifted form exp(lam (t' - t)) so large
``lam t`` never overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import PoleError, QuadratureError
from .params import AtomParams, DerivedRates, FieldParams

QUAD_EPSREL = 1e-10


@dataclass
class CoherenceSolution:
    times: np.ndarray
    rho_bc: np.ndarray
    rho_ba: np.ndarray
    rho_ab: np.ndarray
    method: str  # "quadrature" | "closed-form" | "long-time-limit"


def rho_cb_from_rho_ab(rho_ab: complex, omega_p: complex, omega_c: complex, gamma_ab: float) -> complex:
    """rho_cb = -(Omega_p + 2 i gamma_ab rho_ab) / Omega_c."""
    if omega_c == 0:
        raise ZeroDivisionError("Omega_c = 0: no coupling field, outside the EIT regime")
    return -(omega_p + 2j * gamma_ab * rho_ab) / omega_c


def rho_ba_from_rho_bc(rho_bc_value: complex, rho_bc_derivative: complex, omega_c: complex, gamma_bc: float) -> complex:
    """rho_ba = 2i (d rho_bc/dt + gamma_bc rho_bc) / Omega_c."""
    if omega_c == 0:
        raise ZeroDivisionError("Omega_c = 0: no coupling field, outside the EIT regime")
    return 2j * (rho_bc_derivative + gamma_bc * rho_bc_value) / omega_c


def _quad_complex(f, a, b, points=None):
    """Integrate a complex function with QUADPACK; raise on non-convergence."""
    if b <= a:
        return 0j
    # estimate the integrand scale so an all-zero component does not stall
    probe = np.linspace(a, b, 17)
    scale = max(abs(complex(f(x))) for x in probe) * (b - a)
    epsabs = max(scale * 1e-15, 1e-300)
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b) or None
    parts = []
    for comp in (lambda x: complex(f(x)).real, lambda x: complex(f(x)).imag):
        out = quad(comp, a, b, epsrel=QUAD_EPSREL, epsabs=epsabs, limit=500, points=pts, full_output=1)
        if len(out) > 3:  # QUADPACK returns a message only when ier != 0
            info = out[2]
            last = info.get("last", 0)
            worst = "unknown"
            if last:
                k = int(np.argmax(info["elist"][:last]))
                worst = f"[{info['alist'][k]!r}, {info['blist'][k]!r}]"
            raise QuadratureError(
                f"quadrature did not converge on [{a}, {b}]; worst subinterval {worst}: {out[3]}"
            )
        parts.append(out[0])
    return complex(parts[0], parts[1])


def _breakpoints(lam, t):
    # the weight exp(lam (t' - t)) varies on a 1/lam scale just below t
    if lam <= 0:
        return None
    return [t - k / lam for k in (1.0, 4.0, 16.0, 64.0)]


def _damped_integral(g: Callable[[float], complex], lam: float, t: float) -> complex:
    """int_0^t g(t') exp(lam (t' - t)) dt'."""
    return _quad_complex(lambda s: g(s) * np.exp(lam * (s - t)), 0.0, t, _breakpoints(lam, t))


def rho_bc_quadrature(
    omega_p: Callable[[float], complex],
    rates: DerivedRates,
    omega_c: complex,
    gamma_ab: float,
    rho_bc0: complex,
    t: float,
) -> complex:
    """Ground-state coherence rho_bc(t) for an arbitrary probe envelope.

    Solves d rho_bc/dt + lam rho_bc + Omega_p* Omega_c / (4 gamma_ab) = 0
    by quadrature from ``rho_bc0``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    lam = rates.lam
    k = -omega_c / (4.0 * gamma_ab)
    integral = _damped_integral(lambda s: k * np.conj(omega_p(s)), lam, t)
    return integral + rho_bc0 * np.exp(-lam * t)


def central_difference(f: Callable[[float], complex], h: float) -> Callable[[float], complex]:
    """Fourth-order central difference derivative of ``f`` with step ``h``."""

    def df(t):
        return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12.0 * h)

    return df


def _drive_derivative(omega_p, omega_p_dot, fd_step):
    if omega_p_dot is not None:
        return omega_p_dot
    if fd_step is None:
        raise ValueError("supply omega_p_dot, or fd_step for a finite-difference derivative")
    return central_difference(omega_p, fd_step)


def rho_ba_quadrature(
    omega_p: Callable[[float], complex],
    rates: DerivedRates,
    gamma_ab: float,
    gamma_bc: float,
    rho_ba0: complex,
    t: float,
    omega_p_dot: Optional[Callable[[float], complex]] = None,
    fd_step: Optional[float] = None,
) -> complex:
    """Probe coherence rho_ba(t) by quadrature.

    Needs the time derivative of the probe: pass ``omega_p_dot`` when it is
    known analytically, otherwise ``fd_step`` selects a fourth-order central
    difference of ``omega_p``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    dot = _drive_derivative(omega_p, omega_p_dot, fd_step)
    lam = rates.lam
    pref = 1.0 / (2j * gamma_ab)

    def g(s):
        return pref * (np.conj(dot(s)) + gamma_bc * np.conj(omega_p(s)))

    return _damped_integral(g, lam, t) + rho_ba0 * np.exp(-lam * t)


def rho_ab_quadrature(
    omega_p: Callable[[float], complex],
    rates: DerivedRates,
    gamma_ab: float,
    gamma_bc: float,
    rho_ab0: complex,
    t: float,
    omega_p_dot: Optional[Callable[[float], complex]] = None,
    fd_step: Optional[float] = None,
) -> complex:
    """Probe coherence rho_ab(t), integrated directly from the unconjugated drive.

    Equals ``conj(rho_ba_quadrature(...))`` with ``rho_ba0 = conj(rho_ab0)``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    dot = _drive_derivative(omega_p, omega_p_dot, fd_step)
    pref = 1.0 / (-2j * gamma_ab)

    def g(s):
        return pref * (dot(s) + gamma_bc * omega_p(s))

    return _damped_integral(g, rates.lam, t) + rho_ab0 * np.exp(-rates.lam * t)


def _relaxation(eta, lam, t):
    """(exp(eta t) - exp(-lam t)) / (eta + lam), continuous through eta = -lam."""
    x = (eta + lam) * t
    small = np.abs(x) < 1e-5
    safe_x = np.where(small, 1.0, x)
    ratio = np.where(small, 1.0 + x / 2.0 + x * x / 6.0, np.expm1(safe_x) / safe_x)
    return t * np.exp(-lam * t) * ratio


def explicit_coherences(
    mode,
    omega_p_plus0: complex,
    omega_p_minus0: complex,
    position,
    rates: DerivedRates,
    atom: AtomParams,
    omega_c: complex,
    rho_bc0: complex,
    rho_ba0: complex,
    t,
) -> CoherenceSolution:
    """Closed-form coherences driven by the two analytic probe modes.

    ``mode`` is a :class:`eitsim.modes.ProbeModeCoefficients`.  The spatial
    factors exp(sigma k_hat . r) are applied to both mode amplitudes.  The
    probe enters through its conjugate, so for complex roots the exponents
    and denominators use conj(eta); for real roots this is the same
    expression.  At eta = -lam the removable singularity is replaced by its
    limit t exp(-lam t).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam = rates.lam
    r = np.asarray(position, dtype=float)
    spatial = np.exp(mode.sigma * float(np.dot(np.asarray(mode.k_hat_p, dtype=float), r)))
    amps_c = [np.conj(omega_p_plus0 * spatial), np.conj(omega_p_minus0 * spatial)]
    etas_c = [np.conj(mode.eta_plus), np.conj(mode.eta_minus)]

    bc_sum = np.zeros_like(t, dtype=complex)
    ba_sum = np.zeros_like(t, dtype=complex)
    for amp, eta in zip(amps_c, etas_c):
        if amp == 0:
            continue
        rel = _relaxation(eta, lam, t)
        bc_sum += amp * rel
        ba_sum += (eta + atom.gamma_bc) * amp * rel
    decay = np.exp(-lam * t)
    rho_bc = -(np.conj(omega_c) / (4.0 * atom.gamma_ab)) * bc_sum + rho_bc0 * decay
    rho_ba = ba_sum / (2j * atom.gamma_ab) + rho_ba0 * decay
    # exact initial values
    at0 = t == 0
    rho_bc[at0] = rho_bc0
    rho_ba[at0] = rho_ba0
    return CoherenceSolution(t, rho_bc, rho_ba, np.conj(rho_ba), "closed-form")


def rho_ba_longtime(omega_p_plus: complex, rates: DerivedRates, gamma_ab: float, gamma_bc: float) -> complex:
    """Long-time limit of rho_ba: -(i/2) gamma_bc / (gamma_ab gamma_bc + |Omega_c|^2/4) Omega_p+*.

    The caller guarantees t >> 1/lam and a slowly varying mode.
    """
    # gamma_ab * lam = gamma_ab gamma_bc + |Omega_c|^2 / 4
    return -0.5j * gamma_bc / (gamma_ab * rates.lam) * np.conj(omega_p_plus)


def chi_resonant(atom: AtomParams, field: FieldParams) -> complex:
    """Probe susceptibility on resonance, kappa i gamma_bc / (gamma_ab gamma_bc + |Omega_c|^2/4)."""
    field.warn_if_not_eit()
    den = atom.gamma_ab * atom.gamma_bc + abs(field.omega_c_rabi) ** 2 / 4.0
    if den == 0:
        raise PoleError("gamma_ab gamma_bc + |Omega_c|^2/4 = 0")
    return atom.kappa * 1j * atom.gamma_bc / den
