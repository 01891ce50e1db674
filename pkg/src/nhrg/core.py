"""Units, couplings and the dimensionless/dimensionful conversion layer.

All quantities are in natural units with hbar = 1.  A coupling is stored as a
single complex number with the loss convention ``Im(g) <= 0``: the physical
pair ``(g_r, g_i)`` with ``g_i > 0`` maps to ``complex(g_r, -g_i)``.  Whenever
an API talks about ``U_i`` or ``g_i`` it means minus the imaginary part.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "SUPPORTED_DIMENSIONS",
    "SystemConfig",
    "Coupling",
    "FlowDivergence",
    "SingularFlow",
    "TMatrixPole",
    "PoleNotFound",
    "check_dimension",
    "lambda_at",
    "flow_time",
    "surface_area",
    "coupling_prefactor",
    "to_dimensionless",
    "from_dimensionless",
    "loss_part",
    "from_parts",
]

SUPPORTED_DIMENSIONS = (1, 2, 3)


class FlowDivergence(ArithmeticError):
    """The running coupling ran into the Riccati pole (bound-state channel)."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SingularFlow(ArithmeticError):
    """Adaptive integration could not proceed (step size underflow)."""


class TMatrixPole(ZeroDivisionError):
    """The T matrix was evaluated exactly on a pole, ``1 - g*Pi(E) == 0``."""


class PoleNotFound(ArithmeticError):
    """No admissible pole was located by the numerical root finder."""


def check_dimension(d):
    if isinstance(d, bool) or not isinstance(d, int) or d not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"spatial dimension must be one of {SUPPORTED_DIMENSIONS}, got {d!r}")
    return d


@dataclass(frozen=True)
class SystemConfig:
    """Spatial dimension, reduced mass and UV cutoff momentum."""

    d: int = 3
    mu: float = 1.0
    lambda0: float = 1.0

    def __post_init__(self):
        check_dimension(self.d)
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"reduced mass must be positive and finite, got {self.mu!r}")
        if not (self.lambda0 > 0 and math.isfinite(self.lambda0)):
            raise ValueError(f"cutoff must be positive and finite, got {self.lambda0!r}")

    @property
    def energy_unit(self):
        """The cutoff energy ``lambda0**2 / (2 mu)``."""
        return self.lambda0**2 / (2.0 * self.mu)

    def with_cutoff(self, lam):
        return replace(self, lambda0=lam)


@dataclass(frozen=True)
class Coupling:
    """A complex coupling tagged with its representation and scale.

    ``dimensionless=True`` means ``value`` is ``U``; otherwise it is ``g``.
    ``scale`` is the cutoff momentum the value refers to.
    """

    value: complex
    scale: float
    dimensionless: bool = True

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")
        object.__setattr__(self, "value", complex(self.value))

    @property
    def real_part(self):
        return self.value.real

    @property
    def loss_part(self):
        """``U_i`` (or ``g_i``): minus the imaginary part."""
        return -self.value.imag

    @property
    def is_lossy(self):
        return self.loss_part >= 0.0

    def as_dimensionless(self, cfg):
        if self.dimensionless:
            return self
        return Coupling(to_dimensionless(self.value, cfg, self.scale), self.scale, True)

    def as_dimensionful(self, cfg):
        if not self.dimensionless:
            return self
        return Coupling(from_dimensionless(self.value, cfg, self.scale), self.scale, False)


def loss_part(z):
    """Return ``-Im(z)``, i.e. ``U_i`` for ``U = U_r - i U_i``."""
    return -complex(z).imag


def from_parts(real, loss):
    """Build ``real - i*loss``."""
    return complex(real, -loss)


def lambda_at(t, cfg):
    """Cutoff momentum at RG time ``t``: ``lambda0 * exp(-t)``."""
    if t < 0:
        raise ValueError(f"RG time must be non-negative, got {t!r}")
    return cfg.lambda0 * math.exp(-t)


def flow_time(lam, cfg):
    """Inverse of :func:`lambda_at`."""
    if not 0 < lam <= cfg.lambda0:
        raise ValueError(f"scale must lie in (0, lambda0], got {lam!r}")
    return math.log(cfg.lambda0 / lam)


def surface_area(d):
    """``S_d = 2 pi^(d/2) / Gamma(d/2)``: 2, 2*pi, 4*pi for d = 1, 2, 3."""
    check_dimension(d)
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def coupling_prefactor(d):
    """Factor ``2 S_d / (2 pi)^d`` in ``U = factor * mu * g * Lambda^(d-2)``."""
    return 2.0 * surface_area(d) / (2.0 * math.pi) ** d


def to_dimensionless(g, cfg, scale=None):
    """Map a dimensionful coupling ``g`` at ``scale`` (default: cutoff) to ``U``."""
    lam = cfg.lambda0 if scale is None else scale
    return coupling_prefactor(cfg.d) * cfg.mu * complex(g) * lam ** (cfg.d - 2)


def from_dimensionless(U, cfg, scale=None):
    """Inverse of :func:`to_dimensionless`."""
    lam = cfg.lambda0 if scale is None else scale
    return complex(U) / (coupling_prefactor(cfg.d) * cfg.mu * lam ** (cfg.d - 2))
