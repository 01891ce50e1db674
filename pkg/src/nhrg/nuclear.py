"""Neutron-nucleus scattering data on the U plane, and the dineutron near a lossy core.

Lengths are in fm and masses in MeV; ``HBARC`` converts masses to fm^-1.
"""
from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .observables import (
    Region,
    boundary_distance,
    coupling_from_scattering_length,
    on_critical_semicircle,
    scattering_length_from_g,
)

__all__ = [
    "HBARC",
    "DATA_ENV_VAR",
    "TABLE_FILENAME",
    "NucleusRecord",
    "PhasePoint",
    "DineutronParams",
    "DineutronRegime",
    "DineutronResult",
    "TableError",
    "default_table_path",
    "load_nucleus_table",
    "parse_nucleus_table",
    "estimate_ai_from_cross_section",
    "phase_diagram_points",
    "semicircle_polyline",
    "dineutron_coupling",
    "dineutron_ratio",
    "dineutron_solve",
    "dineutron_critical_x",
    "dineutron_critical_x_closed_form",
    "dineutron_gamma_peak",
]

HBARC = 197.3269804  # MeV fm
DATA_ENV_VAR = "NHRG_DATA_DIR"
TABLE_FILENAME = "table_i.csv"

_REQUIRED = ("isotope", "a_r_fm", "a_i_fm")
_OPTIONAL = ("k_fm_inv", "sigma_abs_fm2")


class TableError(ValueError):
    """Malformed nucleus table."""


@dataclass(frozen=True)
class NucleusRecord:
    isotope: str
    a_r: float
    a_i: float
    k: float | None = None
    sigma_abs: float | None = None

    def __post_init__(self):
        if self.a_i > 0:
            raise ValueError(f"{self.isotope}: a_i = {self.a_i!r} > 0 is not absorptive")

    @property
    def a(self):
        return complex(self.a_r, self.a_i)


def estimate_ai_from_cross_section(k, sigma_abs):
    """Small-``k`` estimate ``a_i = -k sigma_abs / (4 pi)``."""
    if not k > 0:
        raise ValueError("k must be positive")
    if sigma_abs < 0:
        raise ValueError("sigma_abs must be non-negative")
    return -k * sigma_abs / (4.0 * math.pi) + 0.0


def default_table_path():
    """Table location: ``$NHRG_DATA_DIR/table_i.csv`` if set, else the bundled copy."""
    env = os.environ.get(DATA_ENV_VAR)
    if env:
        return Path(env) / TABLE_FILENAME
    return Path(str(resources.files("nhrg").joinpath("data", TABLE_FILENAME)))


def _number(text, name, row):
    try:
        val = float(text)
    except (TypeError, ValueError):
        raise TableError(f"row {row}: {name}={text!r} is not a number") from None
    if not math.isfinite(val):
        raise TableError(f"row {row}: {name} must be finite")
    return val


def parse_nucleus_table(text):
    """Parse CSV text with header ``isotope,a_r_fm,a_i_fm[,k_fm_inv,sigma_abs_fm2]``.

    An empty ``a_i_fm`` cell is filled from the optional cross-section columns.
    Row numbers in errors count the header as row 1, ignoring comment and blank lines.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise TableError("empty table") from None
    missing = [c for c in _REQUIRED if c not in header]
    if missing:
        raise TableError(f"header lacks column(s) {missing}; got {header}")
    unknown = [c for c in header if c not in _REQUIRED + _OPTIONAL]
    if unknown:
        raise TableError(f"unknown column(s) {unknown}")
    idx = {c: header.index(c) for c in header}
    records = []
    for row_no, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise TableError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
        cells = {c: row[i].strip() for c, i in idx.items()}
        iso = cells["isotope"]
        if not iso:
            raise TableError(f"row {row_no}: empty isotope label")
        a_r = _number(cells["a_r_fm"], "a_r_fm", row_no)
        k = _number(cells["k_fm_inv"], "k_fm_inv", row_no) if cells.get("k_fm_inv") else None
        s = _number(cells["sigma_abs_fm2"], "sigma_abs_fm2", row_no) if cells.get("sigma_abs_fm2") else None
        if cells["a_i_fm"]:
            a_i = _number(cells["a_i_fm"], "a_i_fm", row_no)
        elif k is not None and s is not None:
            try:
                a_i = estimate_ai_from_cross_section(k, s)
            except ValueError as exc:
                raise TableError(f"row {row_no}: {exc}") from None
        else:
            raise TableError(f"row {row_no}: a_i_fm missing and no cross-section data to estimate it")
        if a_i > 0:
            raise TableError(f"row {row_no}: a_i_fm={a_i!r} is positive (gain, not absorption)")
        records.append(NucleusRecord(iso, a_r, a_i, k, s))
    if not records:
        raise TableError("table has no data rows")
    return records


def load_nucleus_table(source=None):
    """Load records from a path, an open text file, or (default) the bundled table."""
    if source is None:
        source = default_table_path()
    if hasattr(source, "read"):
        return parse_nucleus_table(source.read())
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read nucleus table {str(path)!r}: {exc.strerror or exc}") from exc
    try:
        return parse_nucleus_table(text)
    except TableError as exc:
        raise TableError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class PhasePoint:
    isotope: str
    lambda_t: float
    U: complex
    classification: Region
    boundary_distance: float

    def as_row(self):
        return {
            "isotope": self.isotope,
            "lambda_t": self.lambda_t,
            "U_r": self.U.real,
            "U_i": -self.U.imag + 0.0,
            "classification": self.classification.value,
            "boundary_distance": self.boundary_distance,
        }


def phase_diagram_points(records, lambda_list):
    """Place each nucleus on the U plane at each cutoff ``Lambda_t`` (fm^-1)."""
    out = []
    for lam in lambda_list:
        if not lam > 0:
            raise ValueError(f"cutoff must be positive, got {lam!r}")
    for rec in records:
        for lam in lambda_list:
            U = coupling_from_scattering_length(rec.a, float(lam))
            out.append(PhasePoint(rec.isotope, float(lam), U, on_critical_semicircle(U), boundary_distance(U)))
    return out


def semicircle_polyline(n=181):
    """Points ``(U_r, U_i)`` on the critical semicircle, ``U_i >= 0``."""
    pts = []
    for j in range(n):
        th = math.pi * j / (n - 1)
        pts.append((-0.5 + 0.5 * math.cos(th), 0.5 * math.sin(th)))
    return pts


# ---------------------------------------------------------------- dineutron


class DineutronRegime(str, enum.Enum):
    VIRTUAL = "virtual"
    RESONANT = "resonant"
    BOUND_LIKE = "bound-like"


@dataclass(frozen=True)
class DineutronParams:
    a_nn: float = -18.5
    r_nn: float = 2.7
    M_n: float = 939.0
    x: float = 0.0

    def __post_init__(self):
        if not self.a_nn < 0:
            raise ValueError("a_nn must be negative")
        if not self.r_nn > 0:
            raise ValueError("r_nn must be positive")
        if not self.M_n > 0:
            raise ValueError("M_n must be positive")
        if not self.x >= 0:
            raise ValueError("x must be non-negative")

    @property
    def lambda_nn(self):
        """Cutoff ``4 / (pi r_nn)`` in fm^-1."""
        return 4.0 / (math.pi * self.r_nn)

    @property
    def mu(self):
        """Reduced mass ``M_n / 2`` in fm^-1."""
        return 0.5 * self.M_n / HBARC

    @property
    def c(self):
        """``1 + 8 |a_nn| / (pi^2 r_nn)``."""
        return 1.0 + 8.0 * abs(self.a_nn) / (math.pi**2 * self.r_nn)

    def at(self, x):
        return DineutronParams(self.a_nn, self.r_nn, self.M_n, x)


@dataclass(frozen=True)
class DineutronResult:
    x: float
    a_eff: complex
    energy_dimless: complex  # E M_n a_nn^2
    xi_r: float
    regime: DineutronRegime
    params: DineutronParams = field(repr=False, default=None)

    @property
    def gamma_dimless(self):
        return -self.energy_dimless.imag


def dineutron_coupling(p):
    """Real ``g_nn`` from ``1/g_nn = mu/(2 pi a_nn) - mu Lambda_nn / pi^2`` (fm^2)."""
    inv = p.mu / (2.0 * math.pi * p.a_nn) - p.mu * p.lambda_nn / math.pi**2
    if not inv < 0:
        raise ValueError("parameters give 1/g_nn >= 0")
    return 1.0 / inv


def dineutron_ratio(p):
    """``|a_nn| / a_eff`` from the closed form in ``x``."""
    x = p.x
    c = p.c
    den = 1.0 + x * x
    return complex((-1.0 + (c - 1.0) * x * x) / den, c * x / den)


def dineutron_solve(p, via_coupling=False):
    """Effective scattering length, energy ``E M_n a_nn^2 = -(a_nn/a_eff)^2`` and ``xi_r``.

    ``via_coupling=True`` builds ``a_eff`` from the complex coupling
    ``g_nn (1 + i x)`` instead of the closed form; both must agree.
    """
    if via_coupling:
        G = dineutron_coupling(p) * complex(1.0, p.x)
        a_eff = scattering_length_from_g(G, p.mu, p.lambda_nn).a
        if a_eff == 0:
            raise ZeroDivisionError("a_eff vanished")
        ratio = abs(p.a_nn) / a_eff
    else:
        ratio = dineutron_ratio(p)
        a_eff = abs(p.a_nn) / ratio
    energy = -(ratio * ratio)
    gamma = -energy.imag
    if a_eff.real <= 0:
        regime = DineutronRegime.VIRTUAL
    elif gamma > 0:
        regime = DineutronRegime.RESONANT
    else:
        regime = DineutronRegime.BOUND_LIKE
    return DineutronResult(p.x, a_eff, energy, a_eff.real, regime, p)


def dineutron_critical_x_closed_form(p):
    """``1 / sqrt(8 |a_nn| / (pi^2 r_nn))``."""
    return 1.0 / math.sqrt(p.c - 1.0)


def dineutron_critical_x(p, lo=0.0, hi=1e3, tol=1e-13):
    """Bisection for the sign change of ``Re(|a_nn|/a_eff)`` (equivalently of ``Re a_eff``)."""
    def f(x):
        return dineutron_ratio(p.at(x)).real

    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        raise ValueError(f"no sign change of Re(a_eff) on [{lo}, {hi}]")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dineutron_gamma_peak(p, hi=1e3):
    """Location and height of the largest ``Gamma M_n a_nn^2`` on ``x >= 0``."""
    def gamma(x):
        return -dineutron_solve(p.at(x)).energy_dimless.imag

    grid = [0.0] + [10.0 ** (-4 + 7 * j / 2000) for j in range(2001) if 10.0 ** (-4 + 7 * j / 2000) <= hi]
    vals = [gamma(x) for x in grid]
    j = max(range(len(grid)), key=vals.__getitem__)
    a, b = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    while b - a > 1e-12 * max(1.0, b):
        if gamma(c) > gamma(d):
            b, d = d, c
            c = b - invphi * (b - a)
        else:
            a, c = c, d
            d = a + invphi * (b - a)
    x = 0.5 * (a + b)
    return x, gamma(x)
