"""Steady-state probe response: susceptibility, index, group velocity,
and the magnetic-dipole extension (chi_e, chi_m, eps_r, mu_r).
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import newton

from .errors import BranchCutWarning, ConvergenceError, ParameterError, PoleError
from .params import AtomParams

POLE_EPS = 1e-30
BRANCH_EPS = 1e-9


def chi_steady(omega, atom: AtomParams, omega_c: complex):
    """Probe susceptibility at frequency ``omega`` (scalar or array).

    chi = -kappa (w + i g_bc) / [(w + i g_bc)(w + i g_ab) - |Omega_c|^2/4],
    w = omega - omega_ab.
    """
    w = np.asarray(omega, dtype=float) - atom.omega_ab
    num = w + 1j * atom.gamma_bc
    den = num * (w + 1j * atom.gamma_ab) - abs(omega_c) ** 2 / 4.0
    bad = np.abs(den) < POLE_EPS
    if np.any(bad):
        where = np.asarray(omega, dtype=float)[bad] if np.ndim(omega) else omega
        raise PoleError(f"susceptibility pole at omega = {where!r}")
    chi = -atom.kappa * num / den
    return complex(chi) if np.ndim(chi) == 0 else chi


def _principal_sqrt(z):
    # numpy's sqrt is principal (Re >= 0) for complex input
    return np.sqrt(np.asarray(z, dtype=complex))


def refractive_index_and_vg(omega, atom: AtomParams, omega_c: complex, d_omega: Optional[float] = None):
    """Complex index n = sqrt(1 + chi) and the dispersive group velocity.

    v_g = c / Re(n + omega dn/domega), with dn/domega from a fourth-order
    central difference of step ``d_omega`` (see :func:`default_d_omega`).

    Raises
    ------
    PoleError
        If a stencil point hits a pole; use a smaller ``d_omega``.
    """
    if d_omega is None:
        d_omega = default_d_omega(atom, omega_c)
    if not d_omega > 0:
        raise ParameterError("d_omega must be > 0")
    omega = float(omega)

    def n_of(w):
        return complex(_principal_sqrt(1.0 + chi_steady(w, atom, omega_c)))

    try:
        n_m2, n_m1 = n_of(omega - 2 * d_omega), n_of(omega - d_omega)
        n_p1, n_p2 = n_of(omega + d_omega), n_of(omega + 2 * d_omega)
        n0 = n_of(omega)
    except PoleError as exc:
        raise PoleError(f"{exc}; the finite-difference stencil straddles a pole, reduce d_omega") from None
    dn = (-n_p2 + 8 * n_p1 - 8 * n_m1 + n_m2) / (12.0 * d_omega)
    group_index = (n0 + omega * dn).real
    v_g = atom.c / group_index if group_index != 0 else np.inf
    return n0, v_g


def default_d_omega(atom: AtomParams, omega_c: complex) -> float:
    """Default finite-difference step for dn/domega.

    gamma_bc/100 resolves the transparency feature.  When gamma_bc = 0 the
    window width |Omega_c|^2/(4 gamma_ab) sets the scale instead.  The step is
    further capped at |Omega_c|^2/(400 kappa) so chi changes by only about
    1% across the stencil, which keeps sqrt(1 + chi) smooth when kappa is
    large.
    """
    oc2 = abs(omega_c) ** 2
    if atom.gamma_bc > 0:
        step = atom.gamma_bc / 100.0
    elif oc2 > 0:
        step = oc2 / (4.0 * atom.gamma_ab) / 100.0
    else:
        step = atom.gamma_ab / 100.0
    if atom.kappa > 0 and oc2 > 0:
        step = min(step, oc2 / (400.0 * atom.kappa))
    return step


@dataclass(frozen=True)
class SteadyCoherences:
    rho_ab: complex
    rho_cb: complex


def _gammas(atom: AtomParams):
    g_ab = atom.gamma_ab + 1j * atom.delta_ab
    g_bc = atom.gamma_bc + 1j * (atom.delta_ab - atom.delta_ac)
    return g_ab, g_bc


def _steady_den(atom: AtomParams, omega_c: complex) -> complex:
    g_ab, g_bc = _gammas(atom)
    den = g_ab * g_bc + abs(omega_c) ** 2 / 4.0
    if abs(den) < POLE_EPS:
        raise PoleError("(gamma_ab + i D_ab)(gamma_bc + i(D_ab - D_ac)) + |Omega_c|^2/4 vanishes")
    return den


def steady_two_coherence(atom: AtomParams, omega_p: complex, omega_c: complex) -> SteadyCoherences:
    """Stationary point of the linear (rho_ab, rho_cb) system driven by the probe."""
    den = _steady_den(atom, omega_c)
    _, g_bc = _gammas(atom)
    rho_ab = 1j * omega_p * g_bc / (2.0 * den)
    rho_cb = -omega_p * np.conj(omega_c) / (4.0 * den)
    return SteadyCoherences(complex(rho_ab), complex(rho_cb))


def two_coherence_rhs(rho_ab: complex, rho_cb: complex, atom: AtomParams, omega_p: complex, omega_c: complex):
    """Time derivative of (rho_ab, rho_cb) in the weak-probe two-coherence model."""
    g_ab, g_bc = _gammas(atom)
    d_ab = -g_ab * rho_ab + 0.5j * omega_c * rho_cb + 0.5j * omega_p
    d_cb = 0.5j * np.conj(omega_c) * rho_ab - g_bc * rho_cb
    return complex(d_ab), complex(d_cb)


def rho_cb_ab_relation(rho_ab: complex, atom: AtomParams, omega_c: complex) -> complex:
    """rho_cb = (i/2) Omega_c* / (gamma_bc + i(D_ab - D_ac)) rho_ab."""
    _, g_bc = _gammas(atom)
    if g_bc == 0:
        raise PoleError("gamma_bc + i(delta_ab - delta_ac) = 0")
    return complex(0.5j * np.conj(omega_c) / g_bc * rho_ab)


def chi_e(atom: AtomParams, omega_c: complex) -> complex:
    """Electric susceptibility from the two-coherence steady state."""
    den = _steady_den(atom, omega_c)
    _, g_bc = _gammas(atom)
    return complex(1j * atom.kappa * g_bc / den)


@dataclass(frozen=True)
class ChiMResult:
    chi_m: complex
    iterations: int
    residual: float
    near_branch_cut: bool


def _chi_m_map(atom: AtomParams, omega_c: complex, che: complex):
    _, g_bc = _gammas(atom)
    if g_bc == 0:
        raise PoleError("gamma_bc + i(delta_ab - delta_ac) = 0")
    ratio = atom.dipole_ratio * cmath.exp(1j * atom.dipole_phase)
    coupling = 0.5j * np.conj(omega_c) / g_bc
    pref = complex(ratio * coupling * che)
    one_e = 1.0 + che

    def rhs(x):
        return pref * cmath.sqrt((1.0 + x) / one_e)

    return rhs, one_e


def chi_m_fixed_point(atom: AtomParams, omega_c: complex, tol: float = 1e-12, max_iter: int = 200) -> ChiMResult:
    """Solve the implicit magnetic-susceptibility equation.

    chi_m = r e^{i phi} sqrt((1 + chi_m)/(1 + chi_e)) (i/2) Omega_c*/(gamma_bc + i(D_ab - D_ac)) chi_e

    Fixed-point iteration from chi_m = 0, halving the update whenever it
    grows; falls back to a secant root search if that stalls.  The square
    root is principal; a result within 1e-9 of its branch cut is flagged and
    warned about.  Uniqueness of the root is not claimed.

    Raises
    ------
    ConvergenceError
        When neither method reaches ``|chi_m - RHS(chi_m)| <= tol``.
    """
    if not 1e-14 <= tol <= 1e-6:
        raise ParameterError("tol must lie in [1e-14, 1e-6]")
    che = chi_e(atom, omega_c)
    rhs, one_e = _chi_m_map(atom, omega_c, che)

    x = 0j
    prev_step = np.inf
    iterations = 0
    residual = np.inf
    for iterations in range(1, max_iter + 1):
        fx = rhs(x)
        step = fx - x
        if abs(step) > prev_step:
            fx = x + 0.5 * step
            step = 0.5 * step
        prev_step = abs(step)
        x = fx
        residual = abs(x - rhs(x))
        if residual <= tol:
            break
    else:
        try:
            x = complex(newton(lambda z: z - rhs(z), x, tol=tol * 1e-2, maxiter=max_iter))
        except (RuntimeError, OverflowError, ZeroDivisionError):
            pass
        residual = abs(x - rhs(x))
        if not residual <= tol:
            raise ConvergenceError("chi_m fixed point did not converge", x, residual)

    w = (1.0 + x) / one_e
    near_cut = bool(w.real < 0 and abs(w.imag) < BRANCH_EPS)
    if near_cut:
        warnings.warn("sqrt((1 + chi_m)/(1 + chi_e)) evaluated next to its branch cut", BranchCutWarning, stacklevel=2)
    return ChiMResult(x, iterations, residual, near_cut)


@dataclass(frozen=True)
class SusceptibilityResult:
    omega: float
    chi: complex
    n: complex
    chi_e: complex
    chi_m: complex
    eps_r: complex
    mu_r: complex
    v_g_dispersive: float
    near_branch_cut: bool

    @property
    def negative_eps(self) -> bool:
        return self.eps_r.real < 0

    @property
    def negative_mu(self) -> bool:
        return self.mu_r.real < 0


def susceptibility_result(omega: float, atom: AtomParams, omega_c: complex, d_omega: Optional[float] = None) -> SusceptibilityResult:
    """Evaluate every steady-state response quantity at one frequency."""
    chi = chi_steady(omega, atom, omega_c)
    n, v_g = refractive_index_and_vg(omega, atom, omega_c, d_omega)
    ce = chi_e(atom, omega_c)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BranchCutWarning)
        cm = chi_m_fixed_point(atom, omega_c)
    n_cut = (1.0 + chi).real < 0 and abs((1.0 + chi).imag) < BRANCH_EPS
    return SusceptibilityResult(
        omega=float(omega),
        chi=chi,
        n=n,
        chi_e=ce,
        chi_m=cm.chi_m,
        eps_r=1.0 + ce,
        mu_r=1.0 + cm.chi_m,
        v_g_dispersive=float(v_g),
        near_branch_cut=bool(cm.near_branch_cut or n_cut),
    )
