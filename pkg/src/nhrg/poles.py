"""Complex-energy poles of the contact T matrix.

Energies are written ``E = E_R - i Gamma``; a pole is admissible when
``Gamma >= 0``.  Dimensionless energies are ``2 mu E / lambda0^2``.
"""
from __future__ import annotations

import cmath
import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PoleNotFound, check_dimension, from_dimensionless
from .observables import localization_length
from .scattering import on_shell_momentum, propagator_value

__all__ = [
    "PoleKind",
    "PoleResult",
    "PoleEvent",
    "PoleTrajectory",
    "ResonanceWindows",
    "admissibility",
    "pole_closed_form",
    "pole_closed_form_dimless",
    "pole_solve_numeric",
    "pole_trajectory",
    "count_emergent_resonances",
    "count_emergent_resonances_oracle",
    "resonance_windows",
]

_ZERO_WIDTH = 1e-14


class PoleKind(str, enum.Enum):
    BOUND = "bound"
    VIRTUAL_THRESHOLD = "virtual-threshold"
    RESONANCE = "resonance"
    GROWING = "growing"  # Gamma < 0: inadmissible


def admissibility(E):
    """True iff ``Gamma = -Im(E) >= 0``."""
    return complex(E).imag <= 0.0


def _classify(E):
    E = complex(E)
    gamma = -E.imag
    if abs(gamma) <= _ZERO_WIDTH * abs(E):
        return PoleKind.BOUND if E.real < 0 else PoleKind.VIRTUAL_THRESHOLD
    return PoleKind.RESONANCE if gamma > 0 else PoleKind.GROWING


@dataclass(frozen=True)
class PoleResult:
    energy: complex
    admissible: bool
    kind: PoleKind
    dimensionless_form: complex
    xi: complex | None = None
    residual: float | None = None
    iterations: int | None = None

    @property
    def E_R(self):
        return self.energy.real

    @property
    def gamma(self):
        return -self.energy.imag

    @property
    def phase(self):
        """``Arg(E_R - i Gamma)`` in ``[-pi, pi)``."""
        phi = math.atan2(self.energy.imag, self.energy.real)
        return -math.pi if phi == math.pi else phi


def _result(E, cfg, **extra):
    E = complex(E)
    xi = localization_length(E, cfg.mu).xi if E != 0 else None
    return PoleResult(E, admissibility(E), _classify(E), E / cfg.energy_unit, xi, **extra)


def pole_closed_form_dimless(U0, d):
    """``2 mu E / lambda0^2`` of the pole for dimensionless coupling ``U0``.

    d=1: ``-(pi^2/4) U0^2``; d=2: ``-exp(2/U0)``; d=3: ``-(4/pi^2)(1/U0 + 1)^2``.
    The d=1 and d=2 results drop terms of relative order ``2 mu |E| / lambda0^2``.
    """
    check_dimension(d)
    U0 = complex(U0)
    if U0 == 0:
        raise ValueError("the free theory U0 = 0 has no pole")
    if d == 1:
        return -(math.pi**2 / 4.0) * U0 * U0
    if d == 2:
        return -cmath.exp(2.0 / U0)
    w = 1.0 / U0 + 1.0
    return -(4.0 / math.pi**2) * w * w


def pole_closed_form(U0, cfg):
    """Closed-form pole as a :class:`PoleResult`."""
    return _result(pole_closed_form_dimless(U0, cfg.d) * cfg.energy_unit, cfg)


def _propagator_derivative(E, cfg, form):
    mu, lam, d = cfg.mu, cfg.lambda0, cfg.d
    k = on_shell_momentum(E, mu)
    if d == 3:
        return -1j * mu * mu / (2.0 * math.pi * k)
    x = 2.0 * mu * E
    if d == 2:
        if form == "low-energy":
            return mu / (2.0 * math.pi) * 2.0 * mu / x
        return -mu / (2.0 * math.pi) * 2.0 * mu * (1.0 / (x - lam * lam) - 1.0 / x)
    if form == "low-energy":
        dpi_dk = 1j * mu / (k * k)
    else:
        pi_val = propagator_value(E, cfg, lam, form)
        dpi_dk = -pi_val / k - 2.0 * mu * lam / (math.pi * k * (k * k - lam * lam))
    return dpi_dk * mu / k


def _newton(g, cfg, seed, form, tol, maxiter):
    E = complex(seed)
    if E.imag == 0.0:
        # stay off the real axis so the complex branch functions are used
        E = complex(E.real, -1e-300)
    for it in range(1, maxiter + 1):
        F = 1.0 - g * propagator_value(E, cfg, None, form)
        if abs(F) < tol:
            return E, abs(F), it
        dF = -g * _propagator_derivative(E, cfg, form)
        if dF == 0 or not cmath.isfinite(dF):
            break
        step = F / dF
        # damp steps that would jump across more than the current magnitude
        if abs(step) > 0.5 * abs(E) and abs(E) > 0:
            step *= 0.5 * abs(E) / abs(step)
        E_new = E - step
        if not cmath.isfinite(E_new) or E_new == 0:
            break
        E = E_new
    F = 1.0 - g * propagator_value(E, cfg, None, form) if cmath.isfinite(E) and E != 0 else math.inf
    if abs(F) < tol:
        return E, abs(F), maxiter
    return None


def pole_solve_numeric(U0, cfg, guess=None, form="full", tol=1e-12, maxiter=200):
    """Newton solve of ``1 - g Pi(E) = 0`` on the physical sheet.

    The seed defaults to the closed form.  If that run does not give an
    admissible root the seed is reflected across the real axis and tried
    once more; failing that, :class:`~nhrg.core.PoleNotFound` is raised.
    """
    U0 = complex(U0)
    if U0 == 0:
        raise ValueError("the free theory U0 = 0 has no pole")
    g = from_dimensionless(U0, cfg)
    if guess is None:
        guess = pole_closed_form_dimless(U0, cfg.d) * cfg.energy_unit
    guess = complex(guess)
    if guess == 0:
        raise ValueError("seed sits on the branch point E = 0")
    seeds = [guess] if admissibility(guess) else []
    seeds.append(guess.conjugate() if guess.imag != 0 else guess)
    if not admissibility(guess):
        seeds.insert(0, guess)
    tried = []
    for seed in dict.fromkeys(seeds):
        out = _newton(g, cfg, seed, form, tol, maxiter)
        tried.append(seed)
        if out is None:
            continue
        E, res, it = out
        if abs(E.imag) <= _ZERO_WIDTH * abs(E):
            # a real root picks up round-off in Im(E) of either sign
            E = complex(E.real, 0.0)
        if admissibility(E):
            return _result(E, cfg, residual=res, iterations=it)
    raise PoleNotFound(f"no admissible pole found for U0={U0!r} from seeds {tried!r}")


@dataclass(frozen=True)
class PoleEvent:
    kappa: float
    kind: str  # "gamma-zero" or "energy-zero"
    direction: str  # "appear"/"disappear" for gamma-zero, "to-positive"/"to-negative" for energy-zero
    E_R_sign: int = 0


@dataclass
class PoleTrajectory:
    kappa: np.ndarray
    poles: list
    events: list = field(default_factory=list)
    U_r0: float = 0.0
    pure_imaginary: bool = False
    d: int = 2

    def to_rows(self):
        return [
            (float(k), p.dimensionless_form.real, -p.dimensionless_form.imag, p.admissible, p.kind.value)
            for k, p in zip(self.kappa, self.poles)
        ]

    def to_csv(self):
        out = io.StringIO()
        param = "U_i0" if self.pure_imaginary else "kappa=U_i0/|U_r0|"
        out.write(f"# d={self.d} U_r0={self.U_r0!r} parameter={param}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["kappa", "E_R_dimless", "Gamma_dimless", "admissible", "kind"])
        for row in self.to_rows():
            w.writerow([repr(row[0]), repr(row[1]), repr(row[2] + 0.0), "true" if row[3] else "false", row[4]])
        return out.getvalue()


def _sweep_coupling(U_r0, kappa, pure_imaginary):
    if pure_imaginary:
        return complex(0.0, -kappa)
    return complex(U_r0, -kappa * abs(U_r0))


def _bisect(fn, lo, hi, f_lo, tol):
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pole_trajectory(U_r0, kappa_grid, cfg, pure_imaginary=None, event_tol=1e-10):
    """Closed-form poles along a sweep of the imaginary coupling.

    With ``U_r0 < 0`` the coupling is ``U_r0 - i kappa |U_r0|``.  With
    ``U_r0 == 0`` (or ``pure_imaginary=True``) the grid values are ``U_i0``
    themselves and ``U0 = -i U_i0``.  Sign changes of ``Gamma`` and ``E_R``
    between grid points are refined by bisection to ``event_tol``.
    """
    if U_r0 > 0:
        raise ValueError("sweeps are defined for U_r0 <= 0")
    if pure_imaginary is None:
        pure_imaginary = U_r0 == 0
    grid = np.asarray(kappa_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("kappa grid must be a non-empty 1-d sequence")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("kappa grid must be strictly increasing")
    if np.any(grid < 0):
        raise ValueError("kappa must be non-negative")
    if pure_imaginary and np.any(grid == 0):
        raise ValueError("U_i0 = 0 with U_r0 = 0 is the free theory")

    def energy(kap):
        return pole_closed_form_dimless(_sweep_coupling(U_r0, kap, pure_imaginary), cfg.d)

    poles = [pole_closed_form(_sweep_coupling(U_r0, float(k), pure_imaginary), cfg) for k in grid]
    events = []
    for j in range(grid.size - 1):
        a, b = poles[j].dimensionless_form, poles[j + 1].dimensionless_form
        if a.imag * b.imag < 0:
            k = _bisect(lambda s: -energy(s).imag, grid[j], grid[j + 1], -a.imag, event_tol)
            direction = "appear" if -b.imag > 0 else "disappear"
            sign = int(np.sign(energy(k).real))
            events.append(PoleEvent(k, "gamma-zero", direction, sign))
        if a.real * b.real < 0:
            k = _bisect(lambda s: energy(s).real, grid[j], grid[j + 1], a.real, event_tol)
            direction = "to-positive" if b.real > 0 else "to-negative"
            events.append(PoleEvent(k, "energy-zero", direction))
    events.sort(key=lambda e: e.kappa)
    return PoleTrajectory(grid, poles, events, U_r0, pure_imaginary, cfg.d)


def count_emergent_resonances(U_r0):
    """Number of emergent resonant states of the d=2 sweep at fixed ``|U_r0|``.

    ``2 floor((floor(x) + 1) / 2) - dN`` with ``x = 1/(pi |U_r0|)`` and
    ``dN = 1`` when ``x`` is an odd integer.
    """
    if U_r0 == 0:
        raise ValueError("U_r0 must be non-zero")
    x = 1.0 / (math.pi * abs(U_r0))
    n = round(x)
    is_int = abs(x - n) <= 1e-9 * max(1.0, x)
    m = n if is_int else math.floor(x)
    delta = 1 if (is_int and n % 2 == 1) else 0
    return 2 * ((m + 1) // 2) - delta


@dataclass(frozen=True)
class ResonanceWindows:
    """Brute-force bookkeeping of Gamma >= 0 windows along a d=2 kappa sweep.

    ``windows`` are ``(kappa_start, kappa_end)`` intervals (``inf`` if the
    window is still open at the end of the grid).  ``threshold_contacts``
    are the kappa values at which an admissible pole meets the real axis at
    positive energy (``Gamma -> 0`` with ``E_R > 0``).
    """

    U_r0: float
    windows: tuple
    threshold_contacts: tuple
    kappa_max: float

    @property
    def n_windows(self):
        return len(self.windows)

    @property
    def n_threshold(self):
        return len(self.threshold_contacts)

    @property
    def n_interior_windows(self):
        """Windows other than the ones holding the kappa=0 and kappa->oo states."""
        if not self.windows:
            return 0
        endpoint = {0}
        endpoint.add(len(self.windows) - 1)
        return len(self.windows) - len(endpoint)


def resonance_windows(U_r0, kappa_max=None, grid_size=20000, kappa_min=1e-6):
    """Sweep the d=2 closed-form pole over kappa and record its Gamma >= 0 windows.

    The pole is recomputed from ``-exp(2/U0)`` at every grid point; windows
    are runs of admissible points.  Window edges are refined by bisection on
    ``Gamma``.  A cell whose midpoint disagrees with both (equal) endpoints
    holds two unresolved events and raises ``ValueError``.
    """
    if U_r0 == 0:
        raise ValueError("U_r0 must be non-zero")
    ur = -abs(U_r0)
    if kappa_max is None:
        kappa_max = max(10.0, 20.0 / (math.pi * abs(ur)))
    grid = np.concatenate(([0.0], np.geomspace(kappa_min, kappa_max, grid_size)))
    # the phase of the pole peaks at kappa = 1; keep it on the grid so that a
    # window touching the threshold exactly there is seen
    if 1.0 < kappa_max:
        grid = np.unique(np.append(grid, 1.0))

    def eps(kap):
        return -cmath.exp(2.0 / complex(ur, -kap * abs(ur)))

    vals = [eps(k) for k in grid]
    adm = [v.imag <= 0 for v in vals]
    last = vals[-1]
    if not (adm[-1] and last.real < 0):
        raise ValueError("kappa_max too small: the pole has not settled into the final bound window")

    edges = []  # (kappa, opening?)
    for j in range(grid.size - 1):
        mid_val = eps(0.5 * (grid[j] + grid[j + 1]))
        mid_adm = mid_val.imag <= 0
        if adm[j] == adm[j + 1] and mid_adm != adm[j]:
            raise ValueError(f"grid too coarse near kappa={grid[j]:.6g}: two events in one cell")
        if adm[j] != adm[j + 1]:
            k = _bisect(lambda s: -eps(s).imag, grid[j], grid[j + 1], -vals[j].imag, 1e-12)
            edges.append((k, adm[j + 1]))

    windows, contacts = [], []
    start = 0.0 if adm[0] else None
    for k, opening in edges:
        if opening:
            start = k
        else:
            windows.append((start, k))
            start = None
        if eps(k).real > 0:
            contacts.append(k)
    if start is not None:
        windows.append((start, math.inf))

    # exact tangency at the peak: the pole touches the positive real axis
    # without leaving the window
    for j, k in enumerate(grid):
        v = vals[j]
        if 0 < j < grid.size - 1 and adm[j - 1] and adm[j + 1] and v.real > 0 and abs(v.imag) <= 1e-10 * abs(v):
            contacts.append(float(k))

    merged = []
    for k in sorted(contacts):
        if merged and abs(k - merged[-1]) <= 1e-6 * max(1.0, k):
            continue
        merged.append(k)
    return ResonanceWindows(U_r0, tuple(windows), tuple(merged), kappa_max)


def count_emergent_resonances_oracle(U_r0, kappa_max=None, grid_size=20000):
    """Brute-force count of emergent resonant states.

    Each emergent state is an admissible window in which the pole reaches
    the positive-energy threshold (``Gamma -> 0``, ``E_R > 0``); the oracle
    counts those threshold contacts on a kappa sweep of the closed-form
    pole, independent of the floor formula.
    """
    return resonance_windows(U_r0, kappa_max, grid_size).n_threshold
