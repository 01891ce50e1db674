"""Non-Hermitian RG flow of the dimensionless contact coupling.

With ``U = U_r - i U_i`` the flow equations

    dU_r/dt = -U_r**2 - (d-2) U_r + U_i**2
    dU_i/dt = -(2 U_r + d - 2) U_i

collapse to the holomorphic Riccati equation ``dU/dt = -U**2 - (d-2) U``,
which is what :func:`beta` evaluates and :func:`analytic_flow` solves.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _rk
from .core import (
    FlowDivergence,
    SystemConfig,
    check_dimension,
    loss_part,
)

__all__ = [
    "BLOWUP_BOUND",
    "Scheme",
    "Stability",
    "FixedPoint",
    "FlowTrajectory",
    "CharacteristicScale",
    "beta",
    "beta_components",
    "analytic_flow",
    "integrate_flow",
    "fixed_points",
    "characteristic_scale",
    "momentum_subtraction_flow",
    "momentum_subtraction_exact",
    "momentum_subtraction_cutoff",
    "momentum_subtraction_endpoint",
    "momentum_subtraction_t_matrix",
]

BLOWUP_BOUND = 1e8
# Local error targets sit four decades below the requested global tolerance.
# Near a Riccati pole a local error made at |U_s| is amplified by roughly
# |U_t / U_s|^2, so the extra margin keeps near-miss trajectories in budget.
_LOCAL_FACTOR = 1e-4


class Scheme(str, enum.Enum):
    CUTOFF = "cutoff"
    MOMENTUM_SUBTRACTION = "momentum-subtraction"


class Stability(str, enum.Enum):
    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class FixedPoint:
    U_star: complex
    stability: Stability


@dataclass
class FlowTrajectory:
    """Ordered samples of a flow.

    For the cutoff scheme ``t`` is RG time and ``U`` the dimensionless
    coupling.  For the momentum-subtraction scheme ``t`` holds the
    centre-of-mass momentum ``P`` and ``U`` the dimensionful coupling ``g_P``.
    """

    t: np.ndarray
    U: np.ndarray
    scheme: Scheme = Scheme.CUTOFF
    d: int = 3
    tol: float | None = None
    cfg: SystemConfig | None = None
    diverged: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.U = np.asarray(self.U, dtype=complex)
        if self.t.shape != self.U.shape or self.t.ndim != 1:
            raise ValueError("t and U must be one-dimensional and of equal length")
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return self.t.size

    @property
    def final(self):
        return complex(self.U[-1])

    def to_csv(self, fh=None):
        """Write ``t, U_r, U_i`` rows after a ``#`` metadata line."""
        out = io.StringIO() if fh is None else fh
        header = f"# d={self.d} scheme={Scheme(self.scheme).value} tol={self.tol!r} diverged={self.diverged}"
        out.write(header + "\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["t", "U_r", "U_i"])
        for t, u in zip(self.t, self.U):
            writer.writerow([repr(float(t)), repr(float(u.real)), repr(loss_part(u) + 0.0)])
        if fh is None:
            return out.getvalue()
        return None


def beta(U, d):
    """Complex rate ``dU/dt`` for ``U = U_r - i U_i``."""
    U = complex(U)
    return -U * U - (d - 2) * U


def beta_components(U_r, U_i, d):
    """``(dU_r/dt, dU_i/dt)`` written out component-wise.

    Works elementwise on arrays; used for vector-field tabulation and as an
    independent check on :func:`beta`.
    """
    dr = -U_r**2 - (d - 2) * U_r + U_i**2
    di = -(2 * U_r + d - 2) * U_i
    return dr, di


def _inverse_at(w0, c, t):
    """``1/U`` at time ``t`` given ``w0 = 1/U0``; ``c = d - 2``."""
    if c == 0:
        return w0 + t
    return (w0 + 1.0 / c) * math.exp(c * t) - 1.0 / c


def analytic_flow(U0, d, t, bound=BLOWUP_BOUND):
    """Closed-form solution of the Riccati flow at RG time ``t``.

    ``d = 2``: ``U0 / (1 + U0 t)``; otherwise, with ``c = d - 2``,
    ``1 / ((1/U0 + 1/c) e^{ct} - 1/c)``.

    Raises :class:`FlowDivergence` if the trajectory reaches ``|U| > bound``
    anywhere on ``[0, t]``.
    """
    check_dimension(d)
    if t < 0:
        raise ValueError(f"RG time must be non-negative, got {t!r}")
    U0 = complex(U0)
    if U0 == 0:
        return 0j
    c = d - 2
    w0 = 1.0 / U0
    w = _inverse_at(w0, c, t)
    # Re(w) is monotone in t, Im(w) = Im(w0) e^{ct}; so min |w| over [0, t]
    # sits at an endpoint or where Re(w) crosses zero.
    floor = 1.0 / bound
    candidates = [abs(w)]
    s_cross = _real_zero_crossing(w0, c)
    if s_cross is not None and 0.0 <= s_cross <= t:
        candidates.append(abs(_inverse_at(w0, c, s_cross)))
    if min(candidates) < floor:
        t_hit = s_cross if s_cross is not None and s_cross <= t else t
        raise FlowDivergence(f"flow reaches |U| > {bound:g} before t={t!r}", t=t_hit)
    return 1.0 / w


def _real_zero_crossing(w0, c):
    """Time at which Re(1/U) vanishes, or None if it never does for t >= 0."""
    if c == 0:
        s = -w0.real
        return s if s >= 0 else None
    # (w0.real + 1/c) e^{cs} = 1/c
    a = w0.real + 1.0 / c
    if a == 0 or (1.0 / c) / a <= 0:
        return None
    s = math.log((1.0 / c) / a) / c
    return s if s >= 0 else None


def integrate_flow(U0, d, t_max, tol=1e-10, t_eval=None, bound=BLOWUP_BOUND):
    """Adaptive Dormand-Prince integration of the flow from 0 to ``t_max``.

    The returned trajectory records every accepted step (or exactly the
    ``t_eval`` times).  If ``|U|`` exceeds ``bound`` the integration stops
    and the trajectory is marked ``diverged``.  Step-size underflow raises
    :class:`~nhrg.core.SingularFlow`.
    """
    check_dimension(d)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    U0 = complex(U0)
    local = tol * _LOCAL_FACTOR
    ts, ys, diverged = _rk.integrate(
        lambda _t, u: beta(u, d), 0.0, U0, float(t_max),
        rtol=local, atol=local, t_eval=t_eval, bound=bound,
    )
    return FlowTrajectory(np.array(ts), np.array(ys), Scheme.CUTOFF, d, tol, diverged=diverged)


def fixed_points(d):
    """Real-axis zeros of the beta function with their stability.

    Stability is with respect to increasing RG time (towards the infrared):
    attractive if ``d beta / dU < 0``.
    """
    check_dimension(d)
    c = d - 2
    roots = [0.0] if c == 0 else sorted({0.0, float(-c)})
    out = []
    for r in roots:
        slope = -2.0 * r - c
        if slope < 0:
            kind = Stability.ATTRACTIVE
        elif slope > 0:
            kind = Stability.REPULSIVE
        else:
            kind = Stability.DEGENERATE
        out.append(FixedPoint(complex(r), kind))
    return out


@dataclass(frozen=True)
class CharacteristicScale:
    E_c: float
    t_c: float | None

    @property
    def crosses(self):
        return self.t_c is not None


def characteristic_scale(U0, cfg):
    """Energy ``E_c = (lambda0^2 / 2 mu) exp(2 U_r0 / |U0|^2)`` of the d=2 loop.

    ``t_c = -U_r0 / |U0|^2`` is the time at which the flow crosses ``U_r = 0``;
    it is ``None`` when that crossing does not happen at positive ``t``.
    """
    if cfg.d != 2:
        raise ValueError("the characteristic scale is defined for d = 2")
    U0 = complex(U0)
    if U0 == 0:
        raise ValueError("the free coupling U0 = 0 has no characteristic scale")
    mod2 = abs(U0) ** 2
    E_c = cfg.energy_unit * math.exp(2.0 * U0.real / mod2)
    t_c = -U0.real / mod2
    return CharacteristicScale(E_c, t_c if t_c > 0 else None)


def momentum_subtraction_endpoint(mu, M, lambda0):
    """Momentum at which the effective cutoff reaches zero."""
    return (2.0 / math.pi) * math.sqrt(M / mu) * lambda0


def momentum_subtraction_cutoff(P, mu, M, lambda0):
    """Effective cutoff ``lambda0 - (pi/2) sqrt(mu/M) P``."""
    return lambda0 - 0.5 * math.pi * math.sqrt(mu / M) * np.asarray(P)


def momentum_subtraction_exact(gP0, mu, M, P):
    """Exact solution ``1/g_P = 1/g_0 + (mu / 2 pi) sqrt(mu/M) P``."""
    gP0 = complex(gP0)
    if gP0 == 0:
        return np.zeros_like(np.asarray(P, dtype=float), dtype=complex)
    rate = mu / (2.0 * math.pi) * math.sqrt(mu / M)
    return 1.0 / (1.0 / gP0 + rate * np.asarray(P, dtype=float))


def momentum_subtraction_t_matrix(P, gP, mu, M, lambda0, E=0.0):
    """d=3 T matrix at energy ``E - P^2/2M`` with running coupling ``g_P``.

    At ``E = 0`` this equals ``(1/g_P + mu Lambda~_P / pi^2)^-1`` and is constant
    along :func:`momentum_subtraction_flow`.
    """
    from .scattering import on_shell_momentum

    gP = complex(gP)
    if gP == 0:
        return 0j
    k = on_shell_momentum(E - P * P / (2.0 * M), mu)
    inv = 1.0 / gP + mu * lambda0 / math.pi**2 + 1j * mu * k / (2.0 * math.pi)
    return 1.0 / inv


def momentum_subtraction_flow(gP0, mu, M, P_max, tol=1e-10, lambda0=None, t_eval=None,
                              bound=BLOWUP_BOUND):
    """Integrate ``dg_P/dP = -(mu / 2 pi) sqrt(mu/M) g_P^2`` from ``P = 0``.

    If ``lambda0`` is given, ``P_max`` is clipped to the end of the flow
    range where the effective cutoff vanishes; the trajectory's ``meta``
    records the effective cutoff at every sample.
    """
    if not (M > 0 and mu > 0):
        raise ValueError("masses must be positive")
    if not P_max > 0:
        raise ValueError("P_max must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    meta = {"mu": mu, "M": M}
    if lambda0 is not None:
        P_end = momentum_subtraction_endpoint(mu, M, lambda0)
        meta["P_end"] = P_end
        meta["lambda0"] = lambda0
        if P_max > P_end:
            P_max = P_end
            meta["clipped"] = True
    rate = mu / (2.0 * math.pi) * math.sqrt(mu / M)
    local = tol * _LOCAL_FACTOR
    ts, ys, diverged = _rk.integrate(
        lambda _p, g: -rate * g * g, 0.0, complex(gP0), float(P_max),
        rtol=local, atol=local * max(abs(complex(gP0)), 1e-300), t_eval=t_eval, bound=bound,
    )
    traj = FlowTrajectory(np.array(ts), np.array(ys), Scheme.MOMENTUM_SUBTRACTION, 3, tol,
                          diverged=diverged, meta=meta)
    if lambda0 is not None:
        meta["effective_cutoff"] = momentum_subtraction_cutoff(traj.t, mu, M, lambda0)
    if diverged:
        raise FlowDivergence(f"g_P diverges near P={traj.t[-1]!r}", t=float(traj.t[-1]))
    return traj
