"""Acoustic contrast control for PAL and EDL arrays.

For a PAL array the pressure at control point m is ``s1^H H_m s2``. With
one drive fixed, the contrast is a Rayleigh quotient in the other, so the
optimum alternates between two generalized eigenproblems. For an EDL array
(``p_m = h_m^T s``) a single eigenproblem gives the optimum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .eigen import CholeskyError, EigenPairResult, max_generalized_eigenpair
from .field import SourcePair, TransferTensor, audio_pressure
from .model import Zone
from .rng import STREAM_INIT, counter_rng

log = logging.getLogger(__name__)

CONTRAST_CEIL_DB = 300.0
RIDGE_RETRIES = 3


class OptimizerError(RuntimeError):
    """The eigensolver failed even after ridge escalation."""


@dataclass(frozen=True)
class ContrastResult:
    drives: SourcePair
    contrast_db: float
    history: tuple[float, ...]
    iterations_run: int
    degenerate_steps: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def zone_index(tensor: TransferTensor, zone) -> np.ndarray:
    """Indices of the tensor's control points selected by ``zone``.

    ``zone`` is a :class:`Zone` (points inside its rectangle), a boolean
    mask, or an integer index array.
    """
    if isinstance(zone, Zone):
        cp = tensor.control_points
        eps = 1e-12
        inside = (
            (cp[:, 0] >= zone.x_min - eps)
            & (cp[:, 0] <= zone.x_max + eps)
            & (cp[:, 1] >= zone.z_min - eps)
            & (cp[:, 1] <= zone.z_max + eps)
        )
        idx = np.flatnonzero(inside)
    else:
        arr = np.asarray(zone)
        idx = np.flatnonzero(arr) if arr.dtype == bool else arr.astype(int).ravel()
    if len(idx) == 0:
        raise ValueError("zone selects no control points of the tensor")
    if idx.min() < 0 or idx.max() >= tensor.n_points:
        raise IndexError("zone index out of range")
    return idx


def contrast_from_energies(e_bright: float, e_dark: float) -> float:
    if e_dark <= 0:
        if e_bright <= 0:
            raise ValueError("contrast undefined: zero energy in both zones")
        return CONTRAST_CEIL_DB
    if e_bright <= 0:
        return -CONTRAST_CEIL_DB
    return float(np.clip(10.0 * math.log10(e_bright / e_dark), -CONTRAST_CEIL_DB, CONTRAST_CEIL_DB))


def acoustic_contrast(tensor: TransferTensor, drives: SourcePair, bright, dark) -> float:
    """Bright-to-dark energy ratio in dB; ``+300`` when the dark zone is silent."""
    p = audio_pressure(tensor, drives)
    e_b = float(np.sum(np.abs(p[zone_index(tensor, bright)]) ** 2))
    e_d = float(np.sum(np.abs(p[zone_index(tensor, dark)]) ** 2))
    return contrast_from_energies(e_b, e_d)


def _hermitize(g: np.ndarray) -> np.ndarray:
    return 0.5 * (g + g.conj().T)


def build_g_matrices(tensor: TransferTensor, fixed: np.ndarray, which: str, zone) -> np.ndarray:
    """Quadratic form of the zone energy in the free drive.

    ``which="fix-s1"``: ``sum_m H_m^H s1 s1^H H_m`` (form in s2).
    ``which="fix-s2"``: ``sum_m H_m s2 s2^H H_m^H`` (form in s1).
    """
    fixed = np.asarray(fixed, dtype=complex)
    if not np.any(fixed):
        raise ValueError("fixed drive vector must be nonzero")
    if tensor.kind != "pal":
        raise ValueError("G matrices are defined for PAL tensors")
    h = tensor.values[zone_index(tensor, zone)]
    if which == "fix-s1":
        rows = np.einsum("i,mij->mj", fixed.conj(), h)  # s1^H H_m
        return _hermitize(rows.conj().T @ rows)
    if which == "fix-s2":
        cols = h @ fixed  # H_m s2
        return _hermitize(cols.T @ cols.conj())
    raise ValueError("which must be 'fix-s1' or 'fix-s2'")


def edl_energy_matrix(tensor: TransferTensor, zone) -> np.ndarray:
    """``sum_m conj(h_m) h_m^T``, so that the zone energy is ``s^H G s``."""
    h = tensor.values[zone_index(tensor, zone)]
    return _hermitize(h.conj().T @ h)


def solve_with_ridge(a: np.ndarray, b: np.ndarray, ridge_scale: float) -> EigenPairResult:
    """Top eigenpair with a trace-scaled ridge, escalated x10 on failure."""
    n = a.shape[0]
    base = float(np.trace(b).real) / n
    if base <= 0:
        base = float(np.trace(a).real) / n
    if not base > 0:
        raise OptimizerError("bright and dark energy forms both vanish")
    ridge = ridge_scale * base
    for attempt in range(RIDGE_RETRIES + 1):
        try:
            return max_generalized_eigenpair(a, b, ridge)
        except CholeskyError:
            log.debug("Cholesky failed at ridge %g (attempt %d)", ridge, attempt)
            ridge = ridge * 10.0 if ridge > 0 else 1e-12 * base
    raise OptimizerError(f"eigensolver failed after {RIDGE_RETRIES} ridge escalations")


def random_drive(n: int, seed: int, start: int = 0) -> np.ndarray:
    """Unit-norm standard complex Gaussian vector from a counter-based stream."""
    g = counter_rng(seed, start, STREAM_INIT)
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    return v / np.linalg.norm(v)


def _acc_pal_single(tensor, bright, dark, n_itr, s1, ridge):
    history = []
    degenerate = 0
    s2 = None
    for _ in range(n_itr):
        r2 = solve_with_ridge(
            build_g_matrices(tensor, s1, "fix-s1", bright), build_g_matrices(tensor, s1, "fix-s1", dark), ridge
        )
        s2 = r2.eigenvector
        r1 = solve_with_ridge(
            build_g_matrices(tensor, s2, "fix-s2", bright), build_g_matrices(tensor, s2, "fix-s2", dark), ridge
        )
        s1 = r1.eigenvector
        degenerate += int(r1.degenerate) + int(r2.degenerate)
        history.append(acoustic_contrast(tensor, SourcePair(s1, s2), bright, dark))
    drives = SourcePair(s1, s2).normalized()
    return ContrastResult(drives, history[-1], tuple(history), n_itr, degenerate)


def acc_pal(
    tensor: TransferTensor, bright, dark, n_itr: int = 200, seed: int = 0, ridge: float = 1e-10, n_starts: int = 1
) -> ContrastResult:
    """Alternating generalized-eigenvector ACC for a PAL array.

    Starting from a random ``s1``, each iteration sets ``s2`` to the top
    eigenvector of the (bright, dark) forms with ``s1`` fixed, then ``s1``
    likewise with ``s2`` fixed. ``history[i]`` is the contrast after
    iteration ``i + 1``. ``ridge`` is relative to ``trace(dark)/N``. With
    ``n_starts > 1`` the best of several seeded starts is returned.
    """
    if tensor.kind != "pal":
        raise ValueError("acc_pal needs a PAL tensor")
    if n_itr < 1:
        raise ValueError("n_itr must be >= 1")
    best = None
    for start in range(n_starts):
        s1 = random_drive(tensor.n_elements, seed, start)
        res = _acc_pal_single(tensor, bright, dark, n_itr, s1, ridge)
        if best is None or res.contrast_db > best.contrast_db:
            best = res
    return best


def acc_edl(tensor: TransferTensor, bright, dark, ridge: float = 1e-10) -> ContrastResult:
    """Closed-form ACC for an EDL array (one generalized eigenproblem)."""
    if tensor.kind != "edl":
        raise ValueError("acc_edl needs an EDL tensor")
    res = solve_with_ridge(edl_energy_matrix(tensor, bright), edl_energy_matrix(tensor, dark), ridge)
    drives = SourcePair(res.eigenvector)
    c = acoustic_contrast(tensor, drives, bright, dark)
    return ContrastResult(drives, c, (c,), 1, int(res.degenerate))


def optimize(tensor: TransferTensor, bright, dark, n_itr: int = 200, seed: int = 0, ridge: float = 1e-10, n_starts: int = 1):
    """Dispatch to :func:`acc_pal` or :func:`acc_edl` by tensor kind."""
    if tensor.kind == "pal":
        return acc_pal(tensor, bright, dark, n_itr, seed, ridge, n_starts)
    return acc_edl(tensor, bright, dark, ridge)
