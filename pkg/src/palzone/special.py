"""Zeroth-order Bessel and Hankel functions.

Two evaluation branches are used:

* ``|z| < SWITCH_RADIUS``: ascending power series for J0 and Y0.
* ``|z| >= SWITCH_RADIUS``: Hankel asymptotic expansion of H0^(1).

All functions accept scalars or arrays and are vectorized over numpy.
Complex arguments are supported in the closed upper half-plane, which is
where ``k*r`` lives when the wavenumber carries an absorption term.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061

# Series cancellation error is ~ eps * I0(|z|), about 1e-10 at |z| = 15;
# the asymptotic truncation error ~ exp(-2|z|) is far below that there.
SWITCH_RADIUS = 15.0

_N_SERIES = 48
_N_ASYMPTOTIC = 24


def _series_coefficients():
    # c_k = (-1)^k / (k!)^2, d_k = (-1)^(k+1) H_k / (k!)^2 (H_k harmonic number)
    c = np.empty(_N_SERIES)
    d = np.empty(_N_SERIES)
    fact = 1.0
    harmonic = 0.0
    for k in range(_N_SERIES):
        if k > 0:
            fact *= k
            harmonic += 1.0 / k
        c[k] = (-1.0) ** k / fact**2
        d[k] = (-1.0) ** (k + 1) * harmonic / fact**2
    return c, d


def _asymptotic_coefficients():
    # a_k(0) = prod_{j<=k} (-(2j-1)^2) / (k! 8^k)
    a = np.empty(_N_ASYMPTOTIC)
    a[0] = 1.0
    for k in range(1, _N_ASYMPTOTIC):
        a[k] = a[k - 1] * (-((2 * k - 1) ** 2)) / (k * 8.0)
    return a


_SERIES_J, _SERIES_Y = _series_coefficients()
_ASYMPTOTIC = _asymptotic_coefficients()


def _series_j0_y0(z):
    """Power series for J0 and Y0 at complex ``z`` (upper half-plane)."""
    t = 0.25 * z * z
    j = np.zeros_like(z)
    s = np.zeros_like(z)
    for k in range(_N_SERIES - 1, -1, -1):
        j = j * t + _SERIES_J[k]
        s = s * t + _SERIES_Y[k]
    y = (2.0 / math.pi) * ((np.log(0.5 * z) + EULER_GAMMA) * j + s)
    return j, y


def _asymptotic_h0(z):
    """Hankel asymptotic expansion of H0^(1)(z)."""
    w = 1j / z
    acc = np.zeros_like(z)
    for k in range(_N_ASYMPTOTIC - 1, -1, -1):
        acc = acc * w + _ASYMPTOTIC[k]
    return np.sqrt(2.0 / (math.pi * z)) * np.exp(1j * (z - 0.25 * math.pi)) * acc


def _h0_branches(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < SWITCH_RADIUS
    if small.any():
        j, y = _series_j0_y0(z[small])
        out[small] = j + 1j * y
    large = ~small
    if large.any():
        out[large] = _asymptotic_h0(z[large])
    return out


def _check_real(x, *, allow_zero):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("argument must be finite")
    if allow_zero and np.any(x < 0):
        raise ValueError("argument must be >= 0")
    if not allow_zero and np.any(x <= 0):
        raise ValueError("argument must be > 0")
    return x


def bessel_j0(x):
    """Bessel function J0 for real ``x >= 0``."""
    x = _check_real(x, allow_zero=True)
    out = np.empty_like(x)
    small = x < SWITCH_RADIUS
    if np.any(small):
        with np.errstate(divide="ignore", invalid="ignore"):
            j, _ = _series_j0_y0(x[small].astype(complex))
        out[small] = j.real
    if np.any(~small):
        out[~small] = _asymptotic_h0(x[~small].astype(complex)).real
    return out if out.ndim else float(out)


def bessel_y0(x):
    """Bessel function Y0 for real ``x > 0``."""
    x = _check_real(x, allow_zero=False)
    out = _h0_branches(x).imag
    return out if out.ndim else float(out)


def hankel1_0(z):
    """Hankel function of the first kind, order zero.

    Parameters
    ----------
    z : complex or array of complex
        Argument with ``Im(z) >= 0`` and ``z != 0``.

    Returns
    -------
    complex or ndarray
        ``J0(z) + i Y0(z)``.
    """
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("argument must be finite")
    if np.any(z == 0):
        raise ValueError("hankel1_0 is singular at z = 0")
    if np.any(z.imag < 0):
        raise ValueError("hankel1_0 supports Im(z) >= 0 only")
    out = _h0_branches(z)
    return out if out.ndim else complex(out)


def hankel1_0_unchecked(z):
    """:func:`hankel1_0` without argument validation, for inner loops."""
    return _h0_branches(z)
