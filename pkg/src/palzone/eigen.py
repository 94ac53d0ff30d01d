"""Largest generalized eigenpair of a Hermitian positive semidefinite pair.

``A v = lam (B + ridge I) v`` is reduced by a Cholesky factor
``B + ridge I = L L^H`` to the standard problem ``L^-1 A L^-H y = lam y``,
which is diagonalised by cyclic complex Jacobi rotations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

JACOBI_TOL = 1e-12
MAX_SWEEPS = 60
TIE_RTOL = 1e-12


class CholeskyError(np.linalg.LinAlgError):
    """``B + ridge I`` is not numerically positive definite."""


@dataclass(frozen=True)
class EigenPairResult:
    eigenvalue: float
    eigenvector: np.ndarray
    degenerate: bool = False  # top two eigenvalues tie within TIE_RTOL


@njit(cache=True)
def _cholesky(c):
    n = c.shape[0]
    low = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = c[j, j].real
        for k in range(j):
            d -= low[j, k].real ** 2 + low[j, k].imag ** 2
        if not d > 0.0:
            return low, False
        ljj = np.sqrt(d)
        low[j, j] = ljj
        for i in range(j + 1, n):
            s = c[i, j]
            for k in range(j):
                s -= low[i, k] * np.conj(low[j, k])
            low[i, j] = s / ljj
    return low, True


@njit(cache=True)
def _forward_solve(low, b):
    # solves L X = B column by column
    n, m = b.shape
    x = np.empty((n, m), dtype=np.complex128)
    for col in range(m):
        for i in range(n):
            s = b[i, col]
            for k in range(i):
                s -= low[i, k] * x[k, col]
            x[i, col] = s / low[i, i]
    return x


@njit(cache=True)
def _back_solve_h(low, y):
    # solves L^H x = y
    n = y.shape[0]
    x = np.empty(n, dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        s = y[i]
        for k in range(i + 1, n):
            s -= np.conj(low[k, i]) * x[k]
        x[i] = s / low[i, i].real
    return x


@njit(cache=True)
def jacobi_hermitian(a, tol, max_sweeps):
    """Eigen-decomposition of Hermitian ``a`` by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, V, sweeps)``, eigenvalues unsorted and matching
    the columns of ``V``. Stops once the off-diagonal Frobenius norm is at
    most ``tol`` times the full norm.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j].real ** 2 + a[i, j].imag ** 2
    norm = np.sqrt(total)
    sweeps = 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * (a[p, q].real ** 2 + a[p, q].imag ** 2)
        if np.sqrt(off) <= tol * norm:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                ph = apq / g
                theta = (a[q, q].real - a[p, p].real) / (2.0 * g)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(ph)) @ [[c, s], [-s, c]]
                u_pp = c + 0j
                u_pq = s + 0j
                u_qp = -s * np.conj(ph)
                u_qq = c * np.conj(ph)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * u_pp + akq * u_qp
                    a[k, q] = akp * u_pq + akq * u_qq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(u_pp) * apk + np.conj(u_qp) * aqk
                    a[q, k] = np.conj(u_pq) * apk + np.conj(u_qq) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * u_pp + vkq * u_qp
                    v[k, q] = vkp * u_pq + vkq * u_qq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, sweeps


@njit(cache=True)
def _max_pair(a, b, ridge, tol, max_sweeps):
    n = a.shape[0]
    c = b.copy()
    for i in range(n):
        c[i, i] += ridge
    low, ok = _cholesky(c)
    if not ok:
        return 0.0, np.zeros(n, dtype=np.complex128), False, False
    # M = L^-1 A L^-H = L^-1 (L^-1 A^H)^H, A Hermitian
    x = _forward_solve(low, a)
    m = _forward_solve(low, np.conj(x.T).copy())
    m = 0.5 * (m + np.conj(m.T))
    w, v, _ = jacobi_hermitian(m, tol, max_sweeps)
    best = 0
    for i in range(1, n):
        if w[i] > w[best]:
            best = i
    tie = False
    scale = max(abs(w[best]), 1e-300)
    for i in range(n):
        if i != best and abs(w[best] - w[i]) <= TIE_RTOL * scale:
            tie = True
    vec = _back_solve_h(low, v[:, best].copy())
    return w[best], vec, True, tie


def _fix_phase(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if not (np.isfinite(norm) and norm > 0):
        raise FloatingPointError("eigenvector is zero or non-finite")
    v = v / norm
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    v[k] = v[k].real
    return v


def max_generalized_eigenpair(a, b, ridge: float = 0.0) -> EigenPairResult:
    """Maximiser of ``v^H A v / v^H (B + ridge I) v``.

    The eigenvector is unit-norm with its largest-magnitude component real
    and positive. Raises :class:`CholeskyError` when ``B + ridge I`` is not
    positive definite; the caller decides whether to raise ``ridge``.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    if a.ndim != 2 or a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    for name, mat in (("A", a), ("B", b)):
        if not np.all(np.isfinite(mat)):
            raise ValueError(f"{name} has non-finite entries")
        scale = np.linalg.norm(mat)
        if np.linalg.norm(mat - mat.conj().T) > 1e-10 * max(scale, 1e-300):
            raise ValueError(f"{name} is not Hermitian")
    lam, vec, ok, tie = _max_pair(a, b, float(ridge), JACOBI_TOL, MAX_SWEEPS)
    if not ok:
        raise CholeskyError("B + ridge*I is not positive definite; increase ridge")
    return EigenPairResult(float(lam), _fix_phase(vec), bool(tie))
