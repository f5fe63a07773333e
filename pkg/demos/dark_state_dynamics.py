"""Atoms relaxing into the dark state under a weak probe.

Run with ``python3 demos/dark_state_dynamics.py``.  Prints the full Bloch
solution next to the adiabatic closed forms so the slow ground-state
depletion that the linear theory ignores is visible.
"""

import numpy as np

from eitsim import DensityMatrix3, integrate_bloch, rho_ab_quadrature, rho_bc_quadrature
from eitsim.params import derive_rates, dimensionless_params

# %% canonical point in units gamma_ab = 1
atom, field = dimensionless_params()
rates = derive_rates(atom, field)
print(f"lambda = {rates.lam:.4f}, beta = {rates.beta:.4f}")

op, oc = field.omega_p_rabi, field.omega_c_rabi
times = np.linspace(0.0, 50.0 / rates.lam, 11)

# %% full density-matrix integration from |b>
traj = integrate_bloch(DensityMatrix3.dark(), atom, op, oc, (0.0, times[-1]), tol=1e-9, t_eval=times)
print(f"accepted steps {traj.n_accepted}, rejected {traj.n_rejected}")

# %% adiabatic answers for the same constant drive
bc = [rho_bc_quadrature(lambda t: op, rates, oc, atom.gamma_ab, 0.0, t) for t in times]
ab = [rho_ab_quadrature(lambda t: op, rates, atom.gamma_ab, atom.gamma_bc, 0.0, t, omega_p_dot=lambda t: 0.0) for t in times]

print(f"{'t':>8} {'rho_bb':>9} {'Re rho_bc':>11} {'adiabatic':>11} {'Im rho_ab':>11} {'adiabatic':>11}")
for k, t in enumerate(times):
    print(f"{t:8.1f} {traj.bb[k].real:9.5f} {traj.bc[k].real:11.6f} {bc[k].real:11.6f} {traj.ab[k].imag:11.3e} {ab[k].imag:11.3e}")

# the gap grows with the probe: the Bloch atoms lose ground-state population
# that the linear relations keep pinned at one
for ratio in (0.025, 0.05, 0.1, 0.2):
    t_end = 50.0 / rates.lam
    end = integrate_bloch(DensityMatrix3.dark(), atom, ratio * oc, oc, (0.0, t_end), tol=1e-9, t_eval=[t_end])
    print(f"Omega_p/Omega_c = {ratio:5.3f}: 1 - rho_bb at the end = {1 - end.bb[-1].real:.3e}")
