"""Dormand-Prince 5(4) embedded Runge-Kutta pair for scalar complex ODEs."""
from __future__ import annotations

import math

from .core import SingularFlow

# Butcher tableau (Dormand & Prince 1980), FSAL form.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# difference between the 5th and embedded 4th order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _step(f, t, y, h, k0):
    k = [k0]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(f(t + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k))
    err = h * sum(e * kj for e, kj in zip(_E, k))
    return y_new, err, k[6]


def integrate(f, t0, y0, t_end, rtol, atol, t_eval=None, bound=math.inf, h0=None):
    """Integrate ``dy/dt = f(t, y)`` from ``t0`` to ``t_end``.

    Returns ``(ts, ys, diverged)``.  Every accepted step is recorded unless
    ``t_eval`` is given, in which case steps are clipped to land on exactly
    those times and only they are recorded.  Integration stops early, with
    ``diverged=True``, once ``|y|`` exceeds ``bound``; the step that crossed
    it is always recorded.
    """
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    y = complex(y0)
    t = float(t0)
    ts, ys = [t], [y]
    if t_end == t0:
        return ts, ys, False

    targets = None
    if t_eval is not None:
        targets = [float(s) for s in t_eval if t0 < s <= t_end]
        if not targets or targets[-1] != t_end:
            targets.append(float(t_end))
    span = t_end - t0
    h_min = 64 * math.ulp(max(abs(t0), abs(t_end), 1.0))

    k0 = f(t, y)
    if h0 is None:
        scale = atol + rtol * abs(y)
        h = 0.01 * scale / abs(k0) if abs(k0) > 0 else span
        h = min(max(h, 1e-6 * span), 0.1 * span)
    else:
        h = h0

    idx = 0
    while t < t_end:
        stop_at = targets[idx] if targets is not None else t_end
        landing = t + h >= stop_at
        h_try = stop_at - t if landing else h
        y_new, err, k_last = _step(f, t, y, h_try, k0)
        scale = atol + rtol * max(abs(y), abs(y_new))
        ratio = abs(err) / scale if math.isfinite(abs(y_new)) else math.inf
        if ratio <= 1.0:
            t = stop_at if landing else t + h_try
            y, k0 = y_new, k_last
            if targets is None or landing:
                ts.append(t)
                ys.append(y)
                if landing and targets is not None:
                    idx += 1
            if abs(y) > bound:
                if ts[-1] != t:
                    ts.append(t)
                    ys.append(y)
                return ts, ys, True
            factor = _MAX_FACTOR if ratio == 0 else min(_MAX_FACTOR, _SAFETY * ratio ** -0.2)
            if not landing:
                h = h_try * factor
            else:
                h = max(h, h_try * factor)
        else:
            h = h_try * max(_MIN_FACTOR, _SAFETY * ratio ** -0.25) if math.isfinite(ratio) else 0.1 * h_try
            if h < h_min:
                raise SingularFlow(f"step size underflow at t={t!r} (|y|={abs(y):.3e})")
    return ts, ys, False
