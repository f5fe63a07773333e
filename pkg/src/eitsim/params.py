"""Physical parameters of the three-level Lambda system and derived rates.

All rates and frequencies are in SI (s^-1, rad/s).  Every formula in the
package is homogeneous in the rates, so a dimensionless system (gamma_ab = 1,
c = 1) can be used by passing numbers in those units; see
:func:`dimensionless_params`.

The atom density N, dipole moment p_ab, epsilon_0 and hbar only ever appear in
the combination ``kappa = N |p_ab|^2 / (epsilon_0 hbar)``, which is therefore
the primary input.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from typing import Optional

from .errors import ParameterError, RegimeWarning

C_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class AtomParams:
    """Decay rates, detunings and medium constants of the Lambda system.

    Level ``a`` is the excited state; ``b`` and ``c`` are the ground states
    coupled to ``a`` by the probe and the coupling laser respectively.

    ``number_density`` is carried for documentation only; it never enters a
    formula (``kappa`` already absorbs it).  ``dipole_phase`` is the phase of
    m*_cb / (p*_ab c); the magnitude of that ratio is ``dipole_ratio``.
    """

    gamma_aa: float
    gamma_bb: float
    gamma_cc: float
    gamma_ab: float
    gamma_ac: float
    gamma_bc: float
    omega_ab: float
    omega_p: float
    kappa: float
    delta_ab: float = 0.0
    delta_ac: float = 0.0
    dipole_ratio: float = 1e-2
    dipole_phase: float = 0.0
    c: float = C_LIGHT
    number_density: Optional[float] = None

    def __post_init__(self):
        for name in ("gamma_aa", "gamma_bb", "gamma_cc", "gamma_ab", "gamma_ac", "gamma_bc"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ParameterError(f"{name} must be a finite rate >= 0, got {value!r}")
        for name in ("omega_ab", "omega_p", "delta_ab", "delta_ac", "dipole_phase"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite, got {getattr(self, name)!r}")
        if not math.isfinite(self.kappa) or self.kappa < 0:
            raise ParameterError(f"kappa must be >= 0, got {self.kappa!r}")
        if not math.isfinite(self.c) or self.c <= 0:
            raise ParameterError(f"c must be > 0, got {self.c!r}")
        if not math.isfinite(self.dipole_ratio) or self.dipole_ratio < 0:
            raise ParameterError(f"dipole_ratio must be >= 0, got {self.dipole_ratio!r}")
        if self.number_density is not None and self.number_density < 0:
            raise ParameterError("number_density must be >= 0")

    @property
    def delta_bc(self) -> float:
        """Two-photon detuning, always ``delta_ac - delta_ab``."""
        return self.delta_ac - self.delta_ab

    @property
    def resonant(self) -> bool:
        return self.delta_ab == 0.0 and self.delta_ac == 0.0


@dataclass(frozen=True)
class FieldParams:
    """Coupling and probe fields.

    ``sigma`` is the spatial shape parameter of the analytic probe modes
    (inverse length); it has no default because nothing fixes it physically.
    """

    omega_c_rabi: complex
    omega_p_rabi: complex = 0.0
    sigma: Optional[float] = None
    k_hat_p: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "omega_c_rabi", complex(self.omega_c_rabi))
        object.__setattr__(self, "omega_p_rabi", complex(self.omega_p_rabi))
        k = tuple(float(x) for x in self.k_hat_p)
        object.__setattr__(self, "k_hat_p", k)
        norm = math.sqrt(sum(x * x for x in k))
        if abs(norm - 1.0) > 1e-12:
            raise ParameterError(f"k_hat_p must be a unit vector, |k_hat_p| = {norm!r}")
        if self.sigma is not None:
            if not math.isfinite(self.sigma):
                raise ParameterError("sigma must be finite")
            object.__setattr__(self, "sigma", float(self.sigma))
        for name in ("omega_c_rabi", "omega_p_rabi"):
            z = getattr(self, name)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ParameterError(f"{name} must be finite")

    @property
    def eit_regime(self) -> bool:
        """True when the coupling dominates the probe, |Omega_c| >= 10 |Omega_p|."""
        return abs(self.omega_c_rabi) >= 10.0 * abs(self.omega_p_rabi)

    def warn_if_not_eit(self):
        if not self.eit_regime:
            warnings.warn(
                f"|Omega_c| = {abs(self.omega_c_rabi):.3g} is not >= 10 |Omega_p| = "
                f"{10 * abs(self.omega_p_rabi):.3g}; adiabatic formulas may not apply",
                RegimeWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class DerivedRates:
    """``lam``: effective coherence decay; ``beta``: probe-medium coupling rate."""

    lam: float
    beta: float


def derive_rates(atom: AtomParams, field: FieldParams) -> DerivedRates:
    """Return lambda = gamma_bc + |Omega_c|^2/(4 gamma_ab) and beta = omega_p kappa/(2 gamma_ab)."""
    if atom.gamma_ab == 0:
        raise ZeroDivisionError("gamma_ab = 0: lambda and beta divide by gamma_ab")
    oc2 = abs(field.omega_c_rabi) ** 2
    lam = atom.gamma_bc + oc2 / (4.0 * atom.gamma_ab)
    beta = atom.omega_p * atom.kappa / (2.0 * atom.gamma_ab)
    return DerivedRates(lam=lam, beta=beta)


def canonical_params(kappa: float = 1e8) -> tuple[AtomParams, FieldParams]:
    """Typical EIT experiment values in SI units.

    gamma_ab = Omega_c = 1e8 s^-1, gamma_bc = 1e6 s^-1, omega_p = omega_ab =
    1e15 s^-1, zero detunings, dipole ratio 1e-2.  ``kappa`` has no
    experimental anchor and defaults to 1e8 s^-1.

    Population decay: gamma_aa = 2 gamma_ab (radiative), ground levels stable.
    The probe is set to 0.1 Omega_c so the pair sits in the EIT regime.
    """
    atom = AtomParams(
        gamma_aa=2e8,
        gamma_bb=0.0,
        gamma_cc=0.0,
        gamma_ab=1e8,
        gamma_ac=1e8,
        gamma_bc=1e6,
        omega_ab=1e15,
        omega_p=1e15,
        kappa=kappa,
        dipole_ratio=1e-2,
    )
    field = FieldParams(omega_c_rabi=1e8, omega_p_rabi=1e7)
    return atom, field


def dimensionless_params(**overrides) -> tuple[AtomParams, FieldParams]:
    """The canonical point in units where gamma_ab = 1 and c = 1.

    Defaults give lambda = 0.26, beta = 1 (omega_p kappa = 2), kappa = 1 and
    sigma = 1.  Keyword overrides are routed to whichever of the two records
    owns the name.
    """
    atom_kw = dict(
        gamma_aa=2.0,
        gamma_bb=0.0,
        gamma_cc=0.0,
        gamma_ab=1.0,
        gamma_ac=1.0,
        gamma_bc=0.01,
        omega_ab=2.0,
        omega_p=2.0,
        kappa=1.0,
        dipole_ratio=1e-2,
        c=1.0,
    )
    field_kw = dict(omega_c_rabi=1.0, omega_p_rabi=0.1, sigma=1.0)
    atom_names = {f.name for f in fields(AtomParams)}
    field_names = {f.name for f in fields(FieldParams)}
    for key, value in overrides.items():
        if key in atom_names:
            atom_kw[key] = value
        elif key in field_names:
            field_kw[key] = value
        else:
            raise TypeError(f"unknown parameter {key!r}")
    return AtomParams(**atom_kw), FieldParams(**field_kw)
