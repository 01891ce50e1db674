"""Pair propagator, contact T matrix, s-wave amplitude and cross sections.

Branch conventions
------------------
The on-shell momentum is ``k = i*sqrt(-2*mu*E)`` with the principal square
root, so ``Im k >= 0`` everywhere (the physical sheet) and ``k -> +sqrt(2 mu E)``
on the positive real axis, which is the retarded ``E + i0`` limit.  Logs use
the principal branch.  A real positive ``E`` is always read as ``E + i0``.

The d=1 closed form follows from doing the cutoff integral directly:

    Pi(E) = (2 mu / (pi k)) * artanh(Lambda / k)

which tends to ``-i mu / k`` as ``Lambda -> oo``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    SystemConfig,
    TMatrixPole,
    from_dimensionless,
    lambda_at,
)

__all__ = [
    "PROPAGATORS",
    "PairPropagator",
    "CrossSections",
    "on_shell_momentum",
    "pair_propagator",
    "propagator_value",
    "low_energy_propagator",
    "exact_propagator_3d",
    "t_matrix",
    "scattering_amplitude_3d",
    "cross_sections",
    "cross_section_rows",
    "rg_invariance_residual",
]

PROPAGATORS = ("full", "low-energy")


def _is_real(E):
    return isinstance(E, (int, float, np.floating, np.integer)) or complex(E).imag == 0.0


def on_shell_momentum(E, mu):
    """``k = i sqrt(-2 mu E)``; the retarded value ``sqrt(2 mu E)`` for real E > 0."""
    if _is_real(E):
        x = 2.0 * mu * float(complex(E).real)
        return complex(math.sqrt(x), 0.0) if x >= 0 else complex(0.0, math.sqrt(-x))
    return 1j * cmath.sqrt(-2.0 * mu * complex(E))


def _artanh_retarded(z, real_axis):
    """Principal artanh; on the real cut |z| > 1 take the ``z - i0`` side.

    With ``z = Lambda / k`` and ``k -> k + i0`` the argument approaches the
    real axis from below.
    """
    if real_axis:
        x = z.real
        if x == 1.0:
            raise ValueError("energy sits exactly at the cutoff energy (log singularity)")
        if abs(x) < 1.0:
            return complex(math.atanh(x), 0.0)
        return complex(0.5 * math.log((x + 1.0) / (x - 1.0)), -0.5 * math.pi * math.copysign(1.0, x))
    return cmath.atanh(z)


@dataclass(frozen=True)
class PairPropagator:
    value: complex
    E: complex
    cfg: SystemConfig
    scale: float
    form: str = "full"

    def __complex__(self):
        return self.value


def _check_branch_point(E, d):
    if complex(E) == 0 and d in (1, 2):
        raise ValueError(f"E = 0 is a branch point of the d={d} propagator")


def propagator_value(E, cfg, scale=None, form="full"):
    """Complex value of the propagator; see :func:`pair_propagator`."""
    if form not in PROPAGATORS:
        raise ValueError(f"unknown propagator form {form!r}; expected one of {PROPAGATORS}")
    lam = cfg.lambda0 if scale is None else float(scale)
    mu, d = cfg.mu, cfg.d
    _check_branch_point(E, d)
    real_axis = _is_real(E)
    k = on_shell_momentum(E, mu)
    if d == 3:
        return -mu * lam / math.pi**2 - 1j * mu * k / (2.0 * math.pi)
    if form == "low-energy":
        if d == 1:
            return 2.0 * mu / (math.pi * lam) - 1j * mu / k
        return -mu / (2.0 * math.pi) * _log_ratio(-lam * lam, 2.0 * mu * complex(E), real_axis)
    if d == 1:
        return 2.0 * mu / (math.pi * k) * _artanh_retarded(lam / k, real_axis and k.imag == 0)
    x = 2.0 * mu * complex(E)
    return -mu / (2.0 * math.pi) * _log_ratio(x - lam * lam, x, real_axis)


def _log_ratio(num, den, real_axis):
    """Principal ``log(num/den)`` with the ``den + i0`` prescription on the real axis."""
    if real_axis:
        n, dd = complex(num).real, complex(den).real
        r = n / dd
        if r == 0:
            raise ValueError("energy sits exactly at the cutoff energy (log singularity)")
        if r > 0:
            return complex(math.log(r), 0.0)
        # (n + i0)/(dd + i0) with n < 0 < dd lies just above the negative axis
        return complex(math.log(-r), math.pi)
    return cmath.log(complex(num) / complex(den))


def pair_propagator(E, cfg, scale=None, form="full"):
    """Two-body propagator Pi(E) with cutoff ``scale`` (default ``cfg.lambda0``).

    ``form="full"`` keeps the complete cutoff dependence in d=1 and d=2; the
    d=3 form is ``-mu Lambda/pi^2 - i (mu/2pi) k`` in both cases.
    ``form="low-energy"`` keeps only the terms that survive for
    ``|E| << Lambda^2 / 2 mu``, which is the form in which the RG equation is
    exact.
    """
    lam = cfg.lambda0 if scale is None else float(scale)
    return PairPropagator(propagator_value(E, cfg, lam, form), complex(E), cfg, lam, form)


def low_energy_propagator(E, cfg, scale=None):
    return propagator_value(E, cfg, scale, "low-energy")


def exact_propagator_3d(E, cfg, scale=None):
    """The d=3 cutoff integral at finite cutoff, ``(mu/pi^2)(-Lambda + k artanh(Lambda/k))``.

    Differs from :func:`pair_propagator` by terms of order ``2 mu E / Lambda^2``.
    """
    lam = cfg.lambda0 if scale is None else float(scale)
    k = on_shell_momentum(E, cfg.mu)
    if k == 0:
        return complex(-cfg.mu * lam / math.pi**2)
    at = _artanh_retarded(lam / k, _is_real(E) and k.imag == 0)
    return cfg.mu / math.pi**2 * (-lam + k * at)


def t_matrix(E, g, cfg, scale=None, form="full"):
    """``T(E) = g / (1 - g Pi(E))`` for a dimensionful coupling ``g``."""
    g = complex(g)
    if g == 0:
        return 0j
    denom = 1.0 - g * propagator_value(E, cfg, scale, form)
    if denom == 0:
        raise TMatrixPole(f"E={E!r} is a pole of the T matrix")
    T = g / denom
    if not cmath.isfinite(T):
        raise OverflowError(f"T matrix overflow at E={E!r}")
    return T


def scattering_amplitude_3d(k, a):
    """s-wave amplitude ``f = (-1/a - i k)^-1 = -a / (1 + i k a)``."""
    if not k > 0:
        raise ValueError(f"momentum must be positive, got {k!r}")
    a = complex(a)
    if a == 0:
        raise ValueError("a = 0 is the free theory (f = 0); no amplitude to form")
    if cmath.isinf(a):
        return 1j / k
    return -a / (1.0 + 1j * k * a)


@dataclass(frozen=True)
class CrossSections:
    k: float
    sigma_el: float
    sigma_abs: float
    sigma_tot: float
    sigma_tot_optical: float

    @property
    def identity_residual(self):
        """Relative mismatch between ``sigma_el + sigma_abs`` and the optical theorem."""
        ref = max(abs(self.sigma_tot_optical), abs(self.sigma_el) + abs(self.sigma_abs))
        if ref == 0:
            return 0.0
        return abs(self.sigma_el + self.sigma_abs - self.sigma_tot_optical) / ref


def cross_sections(k, a):
    """Elastic, absorption and total cross sections for complex ``a = a_r + i a_i``.

    ``sigma_tot`` is the closed form for the total; ``sigma_tot_optical`` is
    ``(4 pi / k) Im f(0)`` computed from the amplitude.
    """
    if not k > 0:
        raise ValueError(f"momentum must be positive, got {k!r}")
    a = complex(a)
    ar, ai = a.real, a.imag
    a2 = ar * ar + ai * ai
    den = ar * ar + (k * a2 - ai) ** 2
    fourpi = 4.0 * math.pi
    if a2 == 0:
        return CrossSections(k, 0.0, 0.0, 0.0, 0.0)
    sigma_el = fourpi * a2 * a2 / den
    sigma_abs = -fourpi * ai / k * a2 / den
    sigma_tot = fourpi * a2 * (a2 - ai / k) / den
    f = scattering_amplitude_3d(k, a)
    return CrossSections(k, sigma_el, sigma_abs, sigma_tot, fourpi / k * f.imag)


def cross_section_rows(k_grid, a):
    """Rows ``(k, sigma_el, sigma_abs, sigma_tot)`` over a momentum grid."""
    rows = []
    for k in k_grid:
        cs = cross_sections(float(k), a)
        rows.append((cs.k, cs.sigma_el, cs.sigma_abs, cs.sigma_tot))
    return rows


def rg_invariance_residual(E, traj, cfg, form="low-energy"):
    """Largest relative deviation of ``T(E)`` along a cutoff-scheme trajectory.

    Each sample ``(t, U_t)`` is converted to ``g`` at ``Lambda_t = lambda0 e^{-t}``
    and ``T(E)`` is evaluated with cutoff ``Lambda_t``.  The default
    ``form="low-energy"`` uses the propagator in which the flow equation is
    exact, so the residual measures integration error only.  With
    ``form="full"`` the residual also picks up the ``O(2 mu E / Lambda_t^2)``
    terms the flow equation drops.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    scales = [lambda_at(float(t), cfg) for t in traj.t]
    e_min = min(scales) ** 2 / (2.0 * cfg.mu)
    if abs(E) >= e_min:
        raise ValueError(f"|E|={abs(E):.3e} is not below the smallest cutoff energy {e_min:.3e}")
    values = []
    for lam, U in zip(scales, traj.U):
        g = from_dimensionless(complex(U), cfg, lam)
        values.append(t_matrix(E, g, cfg, scale=lam, form=form))
    ref = values[0]
    if ref == 0:
        return max(abs(v) for v in values)
    return max(abs(v - ref) for v in values) / abs(ref)
