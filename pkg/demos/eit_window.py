"""The transparency window and the group velocity it implies.

Run with ``python3 demos/eit_window.py``.  Sweeps the probe detuning,
then compares the dispersive group velocity with the closed-form slow-light
speed as the coupling strength and ground-state dephasing change.
"""

import warnings

import numpy as np

from eitsim import RegimeWarning, chi_steady, refractive_index_and_vg, slow_light_vg
from eitsim.params import derive_rates, dimensionless_params
from eitsim.susceptibility import chi_m_fixed_point

atom, field = dimensionless_params()

# %% absorption has a hole at line centre whose width is about |Omega_c|^2 / (4 gamma_ab)
detuning = np.linspace(-2.0, 2.0, 17)
chi = chi_steady(atom.omega_ab + detuning, atom, field.omega_c_rabi)
for d, x in zip(detuning, chi):
    bar = "#" * int(round(60 * x.imag / np.max(chi.imag)))
    print(f"{d:+5.2f}  Im chi = {x.imag:8.5f}  {bar}")

# %% slow light: compare c / Re(n + omega dn/domega) with the closed form
omega_p = 1e6
print(f"\n{'gamma_bc':>9} {'2 w_p kappa/|Oc|^2':>19} {'dispersive':>11} {'closed form':>12}")
for gamma_bc in (0.0, 1e-3, 1e-2):
    for ratio in (10.0, 1e3):
        kappa = ratio / (2.0 * omega_p)
        a, f = dimensionless_params(gamma_bc=gamma_bc, kappa=kappa, omega_p=omega_p, omega_ab=omega_p)
        _, vg = refractive_index_and_vg(omega_p, a, 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            final = slow_light_vg(derive_rates(a, f), a, f).final
        print(f"{gamma_bc:9.0e} {ratio:19.0f} {vg:11.5f} {final:12.5f}")

# %% magnetic response from the ground-state coherence
res = chi_m_fixed_point(atom, field.omega_c_rabi)
print(f"\nchi_m = {res.chi_m:.6f} after {res.iterations} iterations (residual {res.residual:.1e})")
