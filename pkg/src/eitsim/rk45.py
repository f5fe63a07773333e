"""Dormand-Prince 5(4) embedded Runge-Kutta pair with PI step control.

Works on complex state vectors.  The fifth-order solution is propagated
(local extrapolation) and the difference to the embedded fourth-order
solution estimates the local error.  Output at requested times uses the
pair's fourth-order continuous extension, so sampling never shortens steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import IntegrationError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# b5 - b4 including the FSAL stage
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# continuous extension: y(t + th) = y + h * K^T P [th, th^2, th^3, th^4]
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
# PI controller exponents (Gustafsson), divided by the error order + 1
ALPHA = 0.7 / 5
BETA = 0.4 / 5


@dataclass
class ODEResult:
    t: np.ndarray
    y: np.ndarray  # shape (len(t), n)
    n_accepted: int
    n_rejected: int
    n_fev: int


def _error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    with np.errstate(invalid="ignore"):
        return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(fun, t0, y0, f0, direction, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = fun(t0 + h0 * direction, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def dormand_prince(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0,
    rtol: float = 1e-8,
    atol: float = 1e-8,
    t_eval=None,
    first_step: Optional[float] = None,
    max_step: float = np.inf,
    max_steps: int = 1_000_000,
    step_callback: Optional[Callable[[float, np.ndarray], None]] = None,
) -> ODEResult:
    """Integrate ``y' = fun(t, y)`` over ``t_span`` (forward only).

    Parameters
    ----------
    fun : callable
        Right-hand side, returns an array shaped like ``y``.
    t_span : (float, float)
        Start and end time, ``t0 < t1``.
    y0 : array_like
        Initial state; cast to complex.
    rtol, atol : float
        Per-component tolerances of the local error estimate.
    t_eval : array_like, optional
        Sorted output times inside ``t_span``.  Defaults to every accepted
        step.
    step_callback : callable, optional
        Called as ``step_callback(t, y)`` after each accepted step; may raise
        to abort.

    Raises
    ------
    IntegrationError
        When the step size underflows or ``max_steps`` is exceeded.
    """
    t0, t1 = map(float, t_span)
    if not t0 < t1:
        raise ValueError("t_span must satisfy t0 < t1")
    y = np.array(y0, dtype=complex).ravel()
    n = y.size
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t1 or np.any(np.diff(t_eval) < 0)):
            raise ValueError("t_eval must be sorted and lie inside t_span")

    f = np.asarray(fun(t0, y), dtype=complex)
    n_fev = 1
    h = first_step if first_step is not None else _initial_step(fun, t0, y, f, 1.0, rtol, atol)
    n_fev += 1 if first_step is None else 0
    h = min(h, max_step, t1 - t0)

    ts_out = [t0] if t_eval is None else []
    ys_out = [y.copy()] if t_eval is None else []
    i_eval = 0
    if t_eval is not None:
        while i_eval < t_eval.size and t_eval[i_eval] == t0:
            ts_out.append(t0)
            ys_out.append(y.copy())
            i_eval += 1

    K = np.empty((7, n), dtype=complex)
    t = t0
    err_prev = 1e-4
    n_acc = n_rej = 0
    while t < t1:
        if n_acc + n_rej >= max_steps:
            raise IntegrationError("maximum number of steps exceeded", t)
        min_step = 16 * np.spacing(abs(t) if t else 1.0)
        if h < min_step:
            raise IntegrationError("step size underflow (problem too stiff?)", t)
        if t + h > t1 or t1 - (t + h) < min_step:
            h = t1 - t

        K[0] = f
        for s in range(1, 6):
            dy = h * (np.asarray(_A[s]) @ K[:s])
            K[s] = fun(t + _C[s] * h, y + dy)
        y_new = y + h * (_B @ K[:6])
        f_new = np.asarray(fun(t + h, y_new), dtype=complex)
        K[6] = f_new
        n_fev += 6
        err = _error_norm(h * (_E @ K), y, y_new, rtol, atol)

        if err <= 1.0:
            t_new = t + h if h != t1 - t else t1
            if t_eval is not None:
                while i_eval < t_eval.size and t_eval[i_eval] <= t_new:
                    theta = (t_eval[i_eval] - t) / h
                    Q = K.T @ _P
                    powers = theta ** np.arange(1, 5)
                    ts_out.append(t_eval[i_eval])
                    ys_out.append(y + h * (Q @ powers))
                    i_eval += 1
            else:
                ts_out.append(t_new)
                ys_out.append(y_new.copy())
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** (-ALPHA) * err_prev ** BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            t, y, f = t_new, y_new, f_new
            n_acc += 1
            if step_callback is not None:
                step_callback(t, y)
            h = min(h * factor, max_step)
        else:
            n_rej += 1
            h *= max(MIN_FACTOR, SAFETY * err ** (-1 / 5))

    return ODEResult(
        t=np.array(ts_out),
        y=np.array(ys_out).reshape(len(ts_out), n),
        n_accepted=n_acc,
        n_rejected=n_rej,
        n_fev=n_fev,
    )
