"""Three-level Bloch equations with decay and detunings.

The state is carried as six complex numbers ``(aa, bb, cc, ab, ac, bc)``;
the lower triangle of the density matrix is defined by conjugation, so a
state is Hermitian by construction.  The equations are written in the
rotating frame with slowly varying Rabi envelopes:

    d aa/dt = Im(Op* ab + Oc* ac) - g_aa aa
    d ab/dt = -i D_ab ab + (i/2)[Oc cb + Op (bb - aa)] - g_ab ab
    d ac/dt = -i D_ac ac + (i/2)[Op bc + Oc (cc - aa)] - g_ac ac
    d bb/dt = Im(Op ba) - g_bb bb
    d bc/dt = -i (D_ac - D_ab) bc + (i/2)(Op* ac - Oc ba) - g_bc bc
    d cc/dt = Im(Oc ca) - g_cc cc

Population decay has no repopulation terms, so the trace decays whenever a
decaying level is occupied.  The coherence decay rates are independent
inputs, not derived from the population rates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import IntegrationError, InvariantViolation, ParameterError
from .params import AtomParams
from .rk45 import dormand_prince

AA, BB, CC, AB, AC, BC = range(6)

Drive = Union[complex, float, Callable[[float], complex]]


@dataclass(frozen=True)
class DensityMatrix3:
    """Upper triangle of a 3x3 Hermitian density matrix over levels (a, b, c).

    Also used for time derivatives, which share the Hermitian structure but
    not the positivity constraints; :meth:`validate` checks those.
    """

    aa: float = 0.0
    bb: float = 0.0
    cc: float = 0.0
    ab: complex = 0.0
    ac: complex = 0.0
    bc: complex = 0.0

    def __post_init__(self):
        for name in ("aa", "bb", "cc"):
            v = getattr(self, name)
            if isinstance(v, complex) or np.iscomplexobj(v):
                if abs(np.imag(v)) > 1e-12 * max(1.0, abs(v)):
                    raise ParameterError(f"diagonal element {name} must be real, got {v!r}")
                v = np.real(v)
            object.__setattr__(self, name, float(v))
        for name in ("ab", "ac", "bc"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def dark(cls) -> "DensityMatrix3":
        """All population in level b."""
        return cls(bb=1.0)

    @classmethod
    def from_vector(cls, y) -> "DensityMatrix3":
        y = np.asarray(y)
        return cls(
            aa=float(y[AA].real), bb=float(y[BB].real), cc=float(y[CC].real),
            ab=complex(y[AB]), ac=complex(y[AC]), bc=complex(y[BC]),
        )

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix3":
        """Build from a full matrix; rejects non-Hermitian input."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (3, 3):
            raise ParameterError("density matrix must be 3x3")
        if np.max(np.abs(m - m.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
            raise ParameterError("density matrix must be Hermitian")
        return cls(
            aa=m[0, 0].real, bb=m[1, 1].real, cc=m[2, 2].real,
            ab=m[0, 1], ac=m[0, 2], bc=m[1, 2],
        )

    def to_vector(self) -> np.ndarray:
        return np.array([self.aa, self.bb, self.cc, self.ab, self.ac, self.bc], dtype=complex)

    @property
    def ba(self) -> complex:
        return self.ab.conjugate()

    @property
    def ca(self) -> complex:
        return self.ac.conjugate()

    @property
    def cb(self) -> complex:
        return self.bc.conjugate()

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.aa, self.ab, self.ac],
                [self.ba, self.bb, self.bc],
                [self.ca, self.cb, self.cc],
            ],
            dtype=complex,
        )

    @property
    def trace(self) -> float:
        return self.aa + self.bb + self.cc

    def validate(self, tol: float = 1e-9):
        """Raise ParameterError unless populations lie in [0, 1 + tol] and trace <= 1 + tol."""
        for name in ("aa", "bb", "cc"):
            v = getattr(self, name)
            if v < -tol or v > 1.0 + tol:
                raise ParameterError(f"population {name} = {v!r} outside [0, 1]")
        if self.trace > 1.0 + tol:
            raise ParameterError(f"trace {self.trace!r} exceeds 1")
        return self


def _as_drive(value: Drive) -> Callable[[float], complex]:
    if callable(value):
        return value
    const = complex(value)
    return lambda t: const


def bloch_rhs_array(y: np.ndarray, atom: AtomParams, omega_p, omega_c) -> np.ndarray:
    """Vectorised right-hand side on state arrays of shape ``(..., 6)``.

    ``omega_p`` and ``omega_c`` broadcast against ``y[..., 0]``.
    """
    aa, bb, cc = y[..., AA].real, y[..., BB].real, y[..., CC].real
    ab, ac, bc = y[..., AB], y[..., AC], y[..., BC]
    ba, ca, cb = np.conj(ab), np.conj(ac), np.conj(bc)
    op, oc = omega_p, omega_c
    opc, occ = np.conj(op), np.conj(oc)

    out = np.empty(np.broadcast_shapes(y.shape, np.shape(op) + (6,), np.shape(oc) + (6,)), dtype=complex)
    out[..., AA] = np.imag(opc * ab + occ * ac) - atom.gamma_aa * aa
    out[..., BB] = np.imag(op * ba) - atom.gamma_bb * bb
    out[..., CC] = np.imag(oc * ca) - atom.gamma_cc * cc
    out[..., AB] = (
        -1j * atom.delta_ab * ab + 0.5j * (oc * cb + op * (bb - aa)) - atom.gamma_ab * ab
    )
    out[..., AC] = (
        -1j * atom.delta_ac * ac + 0.5j * (op * bc + oc * (cc - aa)) - atom.gamma_ac * ac
    )
    out[..., BC] = (
        -1j * atom.delta_bc * bc + 0.5j * (opc * ac - oc * ba) - atom.gamma_bc * bc
    )
    return out


def bloch_rhs(rho: DensityMatrix3, atom: AtomParams, omega_p: complex, omega_c: complex) -> DensityMatrix3:
    """Time derivative of ``rho`` for fixed probe and coupling Rabi frequencies."""
    dy = bloch_rhs_array(rho.to_vector(), atom, complex(omega_p), complex(omega_c))
    return DensityMatrix3.from_vector(dy)


@dataclass
class BlochTrajectory:
    """Sampled solution of the Bloch equations.

    ``y`` holds the six stored elements per sample, shape ``(n, 6)``.
    """

    times: np.ndarray
    y: np.ndarray
    n_accepted: int
    n_rejected: int
    tol: float

    def __len__(self):
        return self.times.size

    @property
    def states(self) -> list[DensityMatrix3]:
        return [DensityMatrix3.from_vector(row) for row in self.y]

    def state(self, i: int) -> DensityMatrix3:
        return DensityMatrix3.from_vector(self.y[i])

    @property
    def matrices(self) -> np.ndarray:
        """Full density matrices, shape ``(n, 3, 3)``."""
        y = self.y
        m = np.empty((y.shape[0], 3, 3), dtype=complex)
        m[:, 0, 0], m[:, 1, 1], m[:, 2, 2] = y[:, AA].real, y[:, BB].real, y[:, CC].real
        m[:, 0, 1], m[:, 0, 2], m[:, 1, 2] = y[:, AB], y[:, AC], y[:, BC]
        m[:, 1, 0], m[:, 2, 0], m[:, 2, 1] = y[:, AB].conj(), y[:, AC].conj(), y[:, BC].conj()
        return m

    @property
    def trace(self) -> np.ndarray:
        return self.y[:, AA].real + self.y[:, BB].real + self.y[:, CC].real

    def __getattr__(self, name):
        idx = {"aa": AA, "bb": BB, "cc": CC, "ab": AB, "ac": AC, "bc": BC}
        if name in idx:
            col = self.y[:, idx[name]]
            return col.real if name in ("aa", "bb", "cc") else col
        if name in ("ba", "ca", "cb"):
            return np.conj(getattr(self, name[::-1]))
        raise AttributeError(name)


def integrate_bloch(
    rho0: DensityMatrix3,
    atom: AtomParams,
    omega_p: Drive,
    omega_c: Drive,
    t_span: tuple[float, float],
    tol: float = 1e-8,
    t_eval=None,
    max_step: float = np.inf,
) -> BlochTrajectory:
    """Integrate the Bloch equations with adaptive Dormand-Prince steps.

    Parameters
    ----------
    rho0 : DensityMatrix3
        Initial state (validated).
    omega_p, omega_c : complex or callable
        Rabi envelopes; callables are evaluated as ``f(t)`` inside the RHS.
    t_span : (float, float)
        Start and end time.
    tol : float
        Local error tolerance per step, used as both relative and absolute
        tolerance; must lie in [1e-12, 1e-3].
    t_eval : array_like, optional
        Output times.  Defaults to the accepted step times.

    Raises
    ------
    IntegrationError
        On step-size underflow.
    InvariantViolation
        If a population leaves [0, 1] or the trace grows past its initial
        value by more than 1e-6.
    """
    if not 1e-12 <= tol <= 1e-3:
        raise ParameterError(f"tol must lie in [1e-12, 1e-3], got {tol!r}")
    if not t_span[0] < t_span[1]:
        raise ParameterError("t_span must be increasing")
    rho0.validate()
    fp, fc = _as_drive(omega_p), _as_drive(omega_c)
    trace0 = rho0.trace

    def rhs(t, y):
        return bloch_rhs_array(y, atom, fp(t), fc(t))

    def check(t, y):
        pops = y[:3].real
        if np.any(pops < -1e-6) or np.any(pops > 1 + 1e-6):
            raise InvariantViolation(f"population left [0, 1]: {pops}", t)
        if pops.sum() > trace0 + 1e-6:
            raise InvariantViolation(f"trace grew to {pops.sum()!r}", t)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("non-finite state", t)

    res = dormand_prince(
        rhs, t_span, rho0.to_vector(), rtol=tol, atol=tol, t_eval=t_eval,
        max_step=max_step, step_callback=check,
    )
    y = res.y.copy()
    y[:, :3] = y[:, :3].real  # diagonal imaginary parts are roundoff only
    return BlochTrajectory(res.t, y, res.n_accepted, res.n_rejected, tol)


class ReducedResiduals(NamedTuple):
    """Rows of the resonant adiabatic system.

    ``algebraic`` holds the right-hand sides of the four rows whose
    left-hand side is zero (populations of a, coherences ab and ac,
    population of c); ``derivatives`` the two rows that keep a time
    derivative (d bb/dt, d bc/dt).  ``scales`` holds, per algebraic row, the
    sum of the magnitudes of its terms, for relative residuals.
    """

    algebraic: np.ndarray
    derivatives: np.ndarray
    scales: np.ndarray

    @property
    def relative(self) -> np.ndarray:
        out = np.zeros(4)
        nz = self.scales > 0
        out[nz] = np.abs(self.algebraic[nz]) / self.scales[nz]
        return out


def reduced_resonant_rhs(rho: DensityMatrix3, atom: AtomParams, omega_p: complex, omega_c: complex) -> ReducedResiduals:
    """Evaluate the on-resonance adiabatic system for a candidate state.

    A state that satisfies the adiabatic approximation makes all algebraic
    residuals vanish.

    Raises
    ------
    ParameterError
        If any detuning is non-zero.
    """
    if not atom.resonant:
        raise ParameterError("reduced resonant system requires delta_ab = delta_ac = 0")
    op, oc = complex(omega_p), complex(omega_c)
    r = rho
    t1a, t1b, t1c = (op.conjugate() * r.ab).imag, (oc.conjugate() * r.ac).imag, atom.gamma_aa * r.aa
    t2a, t2b, t2c = 0.5j * oc * r.cb, 0.5j * op * (r.bb - r.aa), atom.gamma_ab * r.ab
    t3a, t3b, t3c = 0.5j * op * r.bc, 0.5j * oc * (r.cc - r.aa), atom.gamma_ac * r.ac
    t6a, t6b = (oc * r.ca).imag, atom.gamma_cc * r.cc
    algebraic = np.array([t1a + t1b - t1c, t2a + t2b - t2c, t3a + t3b - t3c, t6a - t6b], dtype=complex)
    scales = np.array(
        [
            abs(t1a) + abs(t1b) + abs(t1c),
            abs(t2a) + abs(t2b) + abs(t2c),
            abs(t3a) + abs(t3b) + abs(t3c),
            abs(t6a) + abs(t6b),
        ]
    )
    d_bb = (op * r.ba).imag - atom.gamma_bb * r.bb
    d_bc = 0.5j * (op.conjugate() * r.ac - oc * r.ba) - atom.gamma_bc * r.bc
    return ReducedResiduals(algebraic, np.array([d_bb, d_bc], dtype=complex), scales)


def population_ratio_check(traj: BlochTrajectory, atom: AtomParams, late_fraction: float = 0.5, eps: float = 1e-30) -> float:
    """Diagnostic for the adiabatic relation gamma_aa rho_aa + gamma_cc rho_cc = 0.

    Returns the maximum, over the last ``late_fraction`` of the samples, of
    ``|g_aa aa + g_cc cc| / (g_aa |aa| + g_cc |cc| + eps)``.  Populations
    are non-negative, so the relation can only hold approximately (both
    terms small); a value near 1 means one of them is not negligible.  This
    is a report, not an assertion.
    """
    n = len(traj)
    start = min(n - 1, int(np.floor(n * (1.0 - late_fraction))))
    aa, cc = traj.aa[start:], traj.cc[start:]
    num = np.abs(atom.gamma_aa * aa + atom.gamma_cc * cc)
    den = atom.gamma_aa * np.abs(aa) + atom.gamma_cc * np.abs(cc) + eps
    return float(np.max(num / den))
