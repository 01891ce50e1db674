"""Scattering length, critical semicircle, localization length and wave functions."""
from __future__ import annotations

import cmath
import csv
import enum
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .special import bessel_k0

__all__ = [
    "BOUNDARY_TOL",
    "Region",
    "NonNormalizableWarning",
    "ScatteringLength",
    "LocalizationLength",
    "scattering_length_from_coupling",
    "scattering_length_from_g",
    "coupling_from_scattering_length",
    "semicircle_form",
    "on_critical_semicircle",
    "boundary_distance",
    "localization_length",
    "wavefunction_2d",
    "wavefunction_3d",
    "profile_rows",
    "profile_csv",
]

BOUNDARY_TOL = 1e-12


class Region(str, enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class NonNormalizableWarning(UserWarning):
    """Profile grows (or fails to decay) at large distance."""


@dataclass(frozen=True)
class ScatteringLength:
    a: complex

    @property
    def a_r(self):
        return self.a.real

    @property
    def a_i(self):
        return self.a.imag

    @property
    def is_absorptive(self):
        return self.a.imag <= 0


@dataclass(frozen=True)
class LocalizationLength:
    xi: complex
    phi: float

    @property
    def xi_r(self):
        return self.xi.real

    @property
    def xi_i(self):
        return self.xi.imag

    @property
    def normalizable(self):
        # Re(xi) > 0 exactly when phi lies in [-pi, 0)
        return self.phi < 0


def scattering_length_from_coupling(U, cfg=None, scale=None):
    """d=3 scattering length ``a = pi U / (2 Lambda (1 + U))``.

    ``scale`` defaults to ``cfg.lambda0`` (or 1 without a config).
    """
    if cfg is not None and cfg.d != 3:
        raise ValueError("the scattering length map is defined for d = 3")
    lam = scale if scale is not None else (cfg.lambda0 if cfg is not None else 1.0)
    U = complex(U)
    if U == -1:
        raise ZeroDivisionError("U = -1 is the unitary point: the scattering length diverges")
    return ScatteringLength(math.pi * U / (2.0 * lam * (1.0 + U)))


def scattering_length_from_g(g, mu, lam):
    """``a = (2 pi / (mu g) + 2 Lambda / pi)^-1`` for a dimensionful d=3 coupling."""
    g = complex(g)
    if g == 0:
        return ScatteringLength(0j)
    inv = 2.0 * math.pi / (mu * g) + 2.0 * lam / math.pi
    if inv == 0:
        raise ZeroDivisionError("coupling sits at unitarity: the scattering length diverges")
    return ScatteringLength(1.0 / inv)


def coupling_from_scattering_length(a, lambda_t):
    """``U_t = 1 / (pi / (2 Lambda_t a) - 1)``; inverse of the map above."""
    a = complex(a.a if isinstance(a, ScatteringLength) else a)
    if a == 0:
        raise ValueError("a = 0 is the free theory")
    if not lambda_t > 0:
        raise ValueError("cutoff must be positive")
    w = math.pi / (2.0 * lambda_t * a) - 1.0
    if w == 0:
        raise ZeroDivisionError("pi / (2 Lambda a) = 1: the coupling diverges")
    return 1.0 / w


def semicircle_form(U):
    """``(U_r + 1/2)^2 + U_i^2``; the critical semicircle is where it equals 1/4."""
    U = complex(U)
    return (U.real + 0.5) ** 2 + U.imag**2


def boundary_distance(U):
    """Euclidean distance in the U plane from ``U`` to the critical circle."""
    U = complex(U)
    return abs(abs(U + 0.5) - 0.5)


def on_critical_semicircle(U, tol=BOUNDARY_TOL):
    """Classify ``U`` against the critical semicircle.

    Inside holds exactly when the d=3 scattering length has ``a_r < 0``.
    """
    q = semicircle_form(U) - 0.25
    if abs(q) < tol:
        return Region.BOUNDARY
    return Region.INSIDE if q < 0 else Region.OUTSIDE


def localization_length(E, mu):
    """``xi = 1 / sqrt(-2 mu E)`` written as ``exp(-i (phi + pi)/2) / sqrt(2 mu |E|)``.

    ``phi = Arg E`` is taken in ``[-pi, pi)`` so that a bound state on the
    negative real axis has ``phi = -pi`` and a real positive ``xi``.
    """
    E = complex(E)
    if E == 0:
        raise ValueError("E = 0 has no localization length")
    if not mu > 0:
        raise ValueError("reduced mass must be positive")
    phi = math.atan2(E.imag, E.real)  # cmath.phase overflows on subnormals
    if phi == math.pi:
        phi = -math.pi
    size = 1.0 / math.sqrt(2.0 * mu * abs(E))
    if phi == 0:
        return LocalizationLength(complex(0.0, -size), phi)
    xi = cmath.exp(-0.5j * (phi + math.pi)) * size
    return LocalizationLength(xi, phi)


def _xi_value(xi):
    return complex(xi.xi if isinstance(xi, LocalizationLength) else xi)


def wavefunction_2d(r, xi, normalization=1.0):
    """``normalization * K0(r / xi)``.

    The profile decays like ``exp(-r Re(1/xi)) / sqrt(r)``.  A profile that
    fails to decay triggers :class:`NonNormalizableWarning`.
    """
    if not r > 0:
        raise ValueError("r must be positive (K0 is singular at the origin)")
    x = _xi_value(xi)
    if x == 0:
        raise ValueError("xi must be non-zero")
    if x.real <= 0:
        warnings.warn(f"xi={x!r} has Re(xi) <= 0: profile is not normalizable", NonNormalizableWarning, stacklevel=2)
    z = r / x
    if z.imag == 0 and z.real < 0:
        # real negative xi: take the upper side of the cut
        z = complex(z.real, 1e-300)
    return complex(normalization) * bessel_k0(z)


def wavefunction_3d(r, xi_r):
    """``exp(-r / xi_r) / r``; ``xi_r = inf`` gives ``1/r``."""
    if not r > 0:
        raise ValueError("r must be positive")
    if xi_r == 0:
        raise ValueError("xi_r must be non-zero")
    if xi_r < 0:
        warnings.warn(f"xi_r={xi_r!r} < 0: profile grows at large r", NonNormalizableWarning, stacklevel=2)
    if math.isinf(xi_r):
        return 1.0 / r
    return math.exp(-r / xi_r) / r


def profile_rows(r_grid, xi, normalization=1.0, d=2):
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonNormalizableWarning)
        for r in np.asarray(r_grid, dtype=float):
            if d == 2:
                psi = wavefunction_2d(float(r), xi, normalization)
            elif d == 3:
                psi = complex(normalization) * wavefunction_3d(float(r), _xi_value(xi).real)
            else:
                raise ValueError("profiles are provided for d = 2 and d = 3")
            rows.append((float(r), psi.real, psi.imag, abs(psi)))
    if _xi_value(xi).real <= 0:
        warnings.warn("profile is not normalizable", NonNormalizableWarning, stacklevel=2)
    return rows


def profile_csv(r_grid, xi, normalization=1.0, d=2):
    """CSV text with columns ``r, Re(psi), Im(psi), abs(psi)``."""
    out = io.StringIO()
    out.write(f"# d={d} xi={_xi_value(xi)!r}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["r", "Re(psi)", "Im(psi)", "abs(psi)"])
    for row in profile_rows(r_grid, xi, normalization, d):
        w.writerow([repr(v + 0.0) for v in row])
    return out.getvalue()
