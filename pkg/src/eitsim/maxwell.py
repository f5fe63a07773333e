"""One-dimensional Maxwell-Bloch propagation of the probe envelope.

The envelope obeys ``c dOmega/dz + dOmega/dt = i omega_p kappa rho_ab``.
Each time step is Strang-split: a half step of the local source/atom
system (RK4), an exact shift of the field along the characteristics
(CFL = 1), then a second local half step.  Transport therefore has no
numerical dispersion and the slow-down comes entirely from the atoms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np

from .bloch import AB, AC, BB, bloch_rhs_array
from .errors import ConfigError, InsufficientDataError, IntegrationError, ParameterError, RegimeWarning
from .params import AtomParams

CouplingChoice = Literal["full-bloch", "adiabatic-rho_ab"]
COUPLING_CHOICES = ("full-bloch", "adiabatic-rho_ab")
MIN_CELLS = 16
SVEA_FRACTION = 0.01
SVEA_POWER_TOL = 1e-6


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [0, length] with ``n_cells`` cells and time step ``dt``.

    Field nodes sit at ``z = j dz`` for ``j = 0 .. n_cells``; node 0 is the
    inflow boundary and atoms occupy nodes 1 .. n_cells.
    """

    length: float
    n_cells: int
    dt: float

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError("grid length must be > 0")
        if int(self.n_cells) != self.n_cells or self.n_cells < MIN_CELLS:
            raise ConfigError(f"n_cells must be an integer >= {MIN_CELLS}")
        if not self.dt > 0:
            raise ConfigError("dt must be > 0")

    @classmethod
    def uniform(cls, length: float, n_cells: int, c: float, cfl: float = 1.0) -> "Grid1D":
        """Grid whose time step gives Courant number ``cfl`` at speed ``c``."""
        return cls(length, n_cells, cfl * (length / n_cells) / c)

    @property
    def dz(self) -> float:
        return self.length / self.n_cells

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_cells + 1)

    def cfl(self, c: float) -> float:
        return c * self.dt / self.dz

    def refined(self) -> "Grid1D":
        """Same domain with dz and dt both halved (Courant number unchanged)."""
        return Grid1D(self.length, 2 * self.n_cells, self.dt / 2)


@dataclass
class PropagationRecord:
    """Output of :func:`propagate`.

    ``field_abs`` and ``rho_ab`` hold snapshots at ``snapshot_times``;
    ``peak_times``/``peak_positions`` hold the interpolated maximum of
    |Omega|^2 at every snapshot where it lies strictly inside the grid.
    """

    grid: Grid1D
    coupling_choice: str
    snapshot_times: np.ndarray
    field_abs: np.ndarray
    rho_ab: np.ndarray
    peak_times: np.ndarray
    peak_positions: np.ndarray
    energy_in: float
    energy_out: float
    max_rho_ab: float
    max_rho_ac: Optional[float]
    n_steps: int
    outflow: np.ndarray = field(repr=False, default=None)

    @property
    def transmission(self) -> float:
        return self.energy_out / self.energy_in if self.energy_in else np.nan

    def peak_monotone(self, z_min: float = 0.0) -> bool:
        """True if the peak never moves backward once it is beyond ``z_min``."""
        sel = self.peak_positions >= z_min
        return bool(np.all(np.diff(self.peak_positions[sel]) >= -1e-9 * self.grid.length))


def _peak_position(z: np.ndarray, power: np.ndarray, floor: float) -> float:
    k = int(np.argmax(power))
    if k == 0 or k == power.size - 1 or power[k] <= floor:
        return np.nan
    ym, y0, yp = power[k - 1], power[k], power[k + 1]
    curv = ym - 2 * y0 + yp
    shift = 0.0 if curv == 0 else 0.5 * (ym - yp) / curv
    return float(z[k] + shift * (z[1] - z[0]))


def _svea_check(inflow, t_end, dt, omega_p):
    """Warn if the inflow spectrum carries power above SVEA_FRACTION * omega_p."""
    ts = np.arange(0.0, t_end + 0.5 * dt, dt)
    samples = np.array([complex(inflow(t)) for t in ts])
    power = np.abs(np.fft.fft(samples)) ** 2
    total = power.sum()
    if total == 0:
        return
    freqs = np.abs(2 * np.pi * np.fft.fftfreq(ts.size, dt))
    frac = power[freqs > SVEA_FRACTION * omega_p].sum() / total
    if frac > SVEA_POWER_TOL:
        warnings.warn(
            f"inflow spectrum has {frac:.2g} of its power above 0.01 omega_p; the envelope approximation is doubtful",
            RegimeWarning,
            stacklevel=3,
        )


def propagate(
    grid: Grid1D,
    atom: AtomParams,
    omega_c: complex,
    inflow: Callable[[float], complex],
    coupling_choice: CouplingChoice,
    t_end: float,
    n_snapshots: int = 200,
    peak_floor: float = 1e-6,
) -> PropagationRecord:
    """Propagate a probe pulse through a homogeneous slab of atoms.

    Parameters
    ----------
    grid : Grid1D
        Must satisfy ``c dt / dz <= 1``.  At exactly 1 the shift is exact;
        below 1 first-order upwind interpolation is used.
    atom : AtomParams
        The source coefficient is ``omega_p * kappa``.
    omega_c : complex
        Constant coupling Rabi frequency.
    inflow : callable
        ``Omega_p(0, t)``.
    coupling_choice : {"full-bloch", "adiabatic-rho_ab"}
        Full density matrix per cell, or the adiabatic ground-coherence ODE
        with rho_ab slaved to the local field.
    t_end : float
        Final time.
    n_snapshots : int
        Approximate number of stored snapshots.
    peak_floor : float
        Peaks with |Omega|^2 below ``peak_floor * max |inflow|^2`` are not
        recorded.

    Raises
    ------
    ConfigError
        For a Courant number above 1 or an unknown coupling choice.
    IntegrationError
        If the field becomes non-finite; the message carries the step index.
    """
    if coupling_choice not in COUPLING_CHOICES:
        raise ConfigError(f"coupling_choice must be one of {COUPLING_CHOICES}")
    nu = grid.cfl(atom.c)
    if nu > 1.0 + 1e-12:
        raise ConfigError(f"CFL number c dt/dz = {nu:.6g} exceeds 1")
    exact_shift = abs(nu - 1.0) <= 1e-12
    if not t_end > 0:
        raise ParameterError("t_end must be > 0")
    _svea_check(inflow, t_end, grid.dt, atom.omega_p)

    n_steps = int(round(t_end / grid.dt))
    dt = grid.dt
    z = grid.z
    n = grid.n_cells
    source = 1j * atom.omega_p * atom.kappa
    g_ab = atom.gamma_ab
    oc = complex(omega_c)

    omega = np.zeros(n + 1, dtype=complex)
    omega[0] = inflow(0.0)
    if coupling_choice == "full-bloch":
        state = np.zeros((n, 6), dtype=complex)
        state[:, BB] = 1.0

        def local_rhs(om, st):
            d_st = bloch_rhs_array(st, atom, om, oc)
            return source * st[:, AB], d_st

        def rho_ab_of(om, st):
            return st[:, AB]
    else:
        if g_ab == 0:
            raise ParameterError("gamma_ab must be > 0 for the adiabatic coupling")
        lam = atom.gamma_bc + abs(oc) ** 2 / (4.0 * g_ab)
        state = np.zeros(n, dtype=complex)  # rho_cb per cell

        def rho_ab_of(om, st):
            return 1j * (oc * st + om) / (2.0 * g_ab)

        def local_rhs(om, st):
            d_st = -lam * st - om * np.conj(oc) / (4.0 * g_ab)
            return source * rho_ab_of(om, st), d_st

    def rk4(om, st, h):
        k1o, k1s = local_rhs(om, st)
        k2o, k2s = local_rhs(om + 0.5 * h * k1o, st + 0.5 * h * k1s)
        k3o, k3s = local_rhs(om + 0.5 * h * k2o, st + 0.5 * h * k2s)
        k4o, k4s = local_rhs(om + h * k3o, st + h * k3s)
        return (
            om + (h / 6.0) * (k1o + 2 * k2o + 2 * k3o + k4o),
            st + (h / 6.0) * (k1s + 2 * k2s + 2 * k3s + k4s),
        )

    snap_every = max(1, n_steps // max(1, n_snapshots))
    snap_t, snap_f, snap_r = [], [], []
    peak_t, peak_z = [], []
    in_peak = max(abs(complex(inflow(t))) ** 2 for t in np.linspace(0.0, t_end, 2001))
    floor = peak_floor * in_peak
    outflow = np.empty(n_steps + 1, dtype=complex)
    outflow[0] = omega[-1]
    inflow_hist = np.empty(n_steps + 1, dtype=complex)
    inflow_hist[0] = omega[0]
    max_ab = float(np.max(np.abs(rho_ab_of(omega[1:], state))))
    max_ac = 0.0

    def snapshot(t):
        power = np.abs(omega) ** 2
        snap_t.append(t)
        snap_f.append(np.abs(omega))
        snap_r.append(np.concatenate(([0j], rho_ab_of(omega[1:], state))))
        zp = _peak_position(z, power, floor)
        if np.isfinite(zp):
            peak_t.append(t)
            peak_z.append(zp)

    snapshot(0.0)
    half = 0.5 * dt
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        omega[1:], state = rk4(omega[1:], state, half)
        if exact_shift:
            omega[1:] = omega[:-1].copy()
        else:
            omega[1:] = (1.0 - nu) * omega[1:] + nu * omega[:-1]
        t_new = step * dt
        omega[0] = inflow(t_new)
        omega[1:], state = rk4(omega[1:], state, half)
        if not np.all(np.isfinite(omega)):
            raise IntegrationError(f"non-finite field at step {step}", t_new)
        ab = np.abs(rho_ab_of(omega[1:], state))
        max_ab = max(max_ab, float(ab.max()))
        if coupling_choice == "full-bloch":
            max_ac = max(max_ac, float(np.abs(state[:, AC]).max()))
        outflow[step] = omega[-1]
        inflow_hist[step] = omega[0]
        if step % snap_every == 0 or step == n_steps:
            snapshot(t_new)

    energy_in = float(np.sum(np.abs(inflow_hist) ** 2) * dt)
    energy_out = float(np.sum(np.abs(outflow) ** 2) * dt)
    return PropagationRecord(
        grid=grid,
        coupling_choice=coupling_choice,
        snapshot_times=np.array(snap_t),
        field_abs=np.array(snap_f),
        rho_ab=np.array(snap_r),
        peak_times=np.array(peak_t),
        peak_positions=np.array(peak_z),
        energy_in=energy_in,
        energy_out=energy_out,
        max_rho_ab=max_ab,
        max_rho_ac=max_ac if coupling_choice == "full-bloch" else None,
        n_steps=n_steps,
        outflow=outflow,
    )


@dataclass(frozen=True)
class VelocityFit:
    v_fit: float
    stderr: float
    n_samples: int

    def __iter__(self):
        return iter((self.v_fit, self.stderr))


def measure_group_velocity(record: PropagationRecord, window: Optional[tuple[float, float]] = None) -> VelocityFit:
    """Least-squares slope of the peak trajectory inside ``window``.

    ``window`` defaults to the central 60% of the grid.  Unpacks as
    ``(v_fit, stderr)``.

    Raises
    ------
    InsufficientDataError
        If fewer than 10 peak samples fall inside the window.
    """
    if window is None:
        window = (0.2 * record.grid.length, 0.8 * record.grid.length)
    lo, hi = window
    sel = (record.peak_positions >= lo) & (record.peak_positions <= hi)
    t = record.peak_times[sel]
    zp = record.peak_positions[sel]
    if t.size < 10:
        raise InsufficientDataError(f"only {t.size} peak samples inside window {window}; need >= 10")
    tm = t - t.mean()
    sxx = float(tm @ tm)
    if sxx == 0:
        raise InsufficientDataError("all peak samples share one time")
    slope = float(tm @ (zp - zp.mean())) / sxx
    resid = zp - zp.mean() - slope * tm
    stderr = float(np.sqrt((resid @ resid) / (t.size - 2) / sxx))
    return VelocityFit(slope, stderr, int(t.size))


@dataclass(frozen=True)
class CouplingFieldReport:
    max_rho_ac: float
    max_rho_ab: float
    ratio: float


def coupling_field_checker(record: PropagationRecord) -> CouplingFieldReport:
    """Largest |rho_ac| seen during a full-Bloch run, compared with |rho_ab|.

    A small ratio supports treating the coupling field as source free.
    """
    if record.max_rho_ac is None:
        raise ParameterError("coupling_field_checker needs a full-bloch run")
    ratio = record.max_rho_ac / record.max_rho_ab if record.max_rho_ab else 0.0
    return CouplingFieldReport(record.max_rho_ac, record.max_rho_ab, ratio)


def gaussian_pulse(amplitude: complex, t0: float, width: float) -> Callable[[float], complex]:
    """amplitude * exp(-((t - t0)/width)^2)."""

    def pulse(t):
        return amplitude * np.exp(-(((t - t0) / width) ** 2))

    return pulse
