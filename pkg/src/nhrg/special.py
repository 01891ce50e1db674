"""Modified Bessel function K0 for complex argument.

Two independent evaluations meet at ``|z| = 8``:

* a power series ``K0 = -(log(z/2) + gamma) I0(z) + sum (z^2/4)^k / (k!)^2 H_k``
  summed in extended precision, since for large ``|z|`` the terms grow like
  ``e^{|z|}`` before cancelling down to ``e^{-z}``;
* the large-argument form ``sqrt(pi/2z) e^{-z} S(z)`` where ``S`` is the
  asymptotic series ``1 - 1/(8z) + 9/(128 z^2) - ...``.  In the right half
  plane ``1/S`` is resummed by Steed's continued fraction (Temme's CF2),
  which reproduces the asymptotic coefficients but converges.  In the
  left half plane ``K0(z) = K0(-z) -/+ i pi I0(-z)`` is used.
"""
from __future__ import annotations

import cmath
import math

import mpmath

__all__ = ["bessel_k0", "k0_series", "k0_large", "k0_asymptotic_series", "bessel_i0", "SWITCH_RADIUS"]

SWITCH_RADIUS = 8.0


def _check(z):
    z = complex(z)
    if z == 0:
        raise ValueError("K0 has a logarithmic singularity at z = 0")
    if z.imag == 0 and z.real < 0:
        raise ValueError("z lies on the branch cut of K0 (negative real axis)")
    if not cmath.isfinite(z):
        raise ValueError(f"non-finite argument {z!r}")
    return z


def _series_sums(z, dps):
    """``(I0(z), sum_k (z^2/4)^k/(k!)^2 H_k)`` at ``dps`` digits."""
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z.real, z.imag)
        q = zz * zz / 4
        term = mpmath.mpf(1)
        harmonic = mpmath.mpf(0)
        i0 = mpmath.mpf(1)
        acc = mpmath.mpf(0)
        eps = mpmath.mpf(10) ** (-dps + 2)
        k = 0
        while True:
            k += 1
            term = term * q / (k * k)
            harmonic += mpmath.mpf(1) / k
            i0 += term
            acc += term * harmonic
            if k > abs(zz) and abs(term) * (harmonic + 1) < eps * abs(i0):
                return i0, acc, zz


def _working_digits(z):
    # the largest term is ~e^{|z|}; the result can be as small as e^{-|z|}
    return 20 + int(0.87 * abs(z)) + 5


def k0_series(z):
    """K0 from its power series (any ``z`` off the cut; slow for large ``|z|``)."""
    z = _check(z)
    dps = _working_digits(z)
    i0, acc, zz = _series_sums(z, dps)
    with mpmath.workdps(dps):
        val = -(mpmath.log(zz / 2) + mpmath.euler) * i0 + acc
    return complex(val)


def bessel_i0(z):
    """I0 from its power series."""
    z = complex(z)
    if z == 0:
        return 1 + 0j
    i0, _, _ = _series_sums(z, _working_digits(z))
    return complex(i0)


def _cf2(z, eps=1e-16, maxit=10000):
    """Steed's continued fraction ``s`` with ``K0(z) = sqrt(pi/2z) e^{-z} / s``, ``Re z >= 0``."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, maxit):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels) < eps * abs(s):
            return s
    raise ArithmeticError(f"K0 continued fraction did not converge at z={z!r}")


def _prefactor(z):
    return cmath.sqrt(math.pi / (2.0 * z)) * cmath.exp(-z)


def k0_large(z):
    """Large-argument K0: resummed asymptotic form, reflected into ``Re z < 0``."""
    z = _check(z)
    if z.real >= 0:
        return _prefactor(z) / _cf2(z)
    w = -z
    sign = 1.0 if z.imag > 0 else -1.0
    return _prefactor(w) / _cf2(w) - sign * 1j * math.pi * bessel_i0(w)


def k0_asymptotic_series(z, terms=None):
    """Plain asymptotic series ``sqrt(pi/2z) e^{-z} sum_n (-1)^n ((2n-1)!!)^2 / (n! (8z)^n)``.

    Truncated at the smallest term unless ``terms`` is given.  Accurate to
    roughly ``e^{-2|z|}`` relative, so only useful for large ``|z|`` with
    ``|Arg z| < pi/2``.
    """
    z = _check(z)
    total = 1 + 0j
    term = 1 + 0j
    n_max = terms if terms is not None else 10_000
    last = math.inf
    for n in range(1, n_max + 1):
        nxt = term * (-(2 * n - 1) ** 2) / (n * 8.0 * z)
        if terms is None and abs(nxt) >= last:
            break
        term = nxt
        last = abs(term)
        total += term
        if terms is None and last < 1e-17 * abs(total):
            break
    return _prefactor(z) * total


def bessel_k0(z):
    """``K0(z)`` on the principal sheet, cut along the negative real axis."""
    z = _check(z)
    if abs(z) <= SWITCH_RADIUS:
        return k0_series(z)
    return k0_large(z)
