"""Straightforward reference for the slab problem in the linear regime.

In the weak-probe limit with gamma_bc = 0 and adiabatic atoms, each
frequency component of the pulse propagates with k(w) from chi(w).  The
output field at z is the inverse FFT of the input spectrum times
exp(i (w/c)(n(w) - 1) z) with n ~ 1 + chi/2 for the envelope.  Used only
to cross-check the time-domain peak velocity in a slow-light slab.
"""

import numpy as np


def envelope_transfer(delta, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z):
    """Envelope transfer function at detuning ``delta`` after a distance ``z``.

    With the linear response rho_ab = chi E / (2 kappa) per frequency, the
    source i omega_p kappa rho_ab becomes i omega_p chi E / 2, so in
    retarded time dE/dz = i omega_p chi E / (2 c).
    """
    num = delta + 1j * gamma_bc
    den = num * (delta + 1j * gamma_ab) - abs(omega_c) ** 2 / 4
    chi = -kappa * num / den
    return np.exp(1j * omega_p * chi * z / (2 * c))


def _propagate_gaussian(pulse_width, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z, n, t_span):
    t_span = t_span or 80 * pulse_width + 40 * z / c
    t = np.linspace(-t_span / 2, t_span / 2, n, endpoint=False)
    e_in = np.exp(-((t / pulse_width) ** 2))
    dt = t[1] - t[0]
    # envelope convention exp(-i delta t)
    delta = -2 * np.pi * np.fft.fftfreq(n, dt)
    e_out = np.fft.ifft(np.fft.fft(e_in) * envelope_transfer(delta, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z))
    return t, e_in, e_out


def energy_transmission(pulse_width, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z, n=2**16, t_span=None):
    """Fraction of |E|^2 that survives a distance ``z``."""
    _, e_in, e_out = _propagate_gaussian(pulse_width, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z, n, t_span)
    return float(np.sum(np.abs(e_out) ** 2) / np.sum(np.abs(e_in) ** 2))


def transmitted_peak_delay(pulse_width, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z, n=2**16, t_span=None):
    """Retarded-time delay of the |E|^2 peak after propagating ``z``."""
    t, _, e_out = _propagate_gaussian(pulse_width, omega_p, kappa, gamma_ab, gamma_bc, omega_c, c, z, n, t_span)
    dt = t[1] - t[0]
    p = np.abs(e_out) ** 2
    k = int(np.argmax(p))
    ym, y0, yp = p[k - 1], p[k], p[k + 1]
    return t[k] + 0.5 * (ym - yp) / (ym - 2 * y0 + yp) * dt
