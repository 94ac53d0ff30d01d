"""Transfer-function perturbation and Monte-Carlo robustness sweeps."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .acc import acc_edl, acc_pal, acoustic_contrast
from .field import TransferTensor
from .model import ExperimentConfig, PerturbationSpec
from .rng import STREAM_EDL, STREAM_PAL, counter_rng

log = logging.getLogger(__name__)


def noise_sigma(values: np.ndarray, snr_db: float) -> float:
    """Amplitude-noise standard deviation: RMS entry magnitude scaled by the SNR."""
    if snr_db == math.inf:
        return 0.0
    rms = math.sqrt(float(np.mean(np.abs(values) ** 2)))
    return rms * 10.0 ** (-snr_db / 20.0)


def perturb_tensor(tensor: TransferTensor, spec: PerturbationSpec, trial_index: int) -> TransferTensor:
    """Add Gaussian noise to every entry's magnitude and phase.

    Magnitudes get ``N(0, sigma^2)`` noise and are clamped at zero; phases
    get ``N(0, R^2)`` noise with ``R = phase_range_deg`` in radians. The
    draws depend only on ``(spec.seed, trial_index, tensor.kind)`` and the
    entry position.
    """
    h = tensor.values
    if not np.all(np.isfinite(h)):
        raise ValueError("cannot perturb a tensor with non-finite entries")
    sigma = noise_sigma(h, spec.snr_db)
    phase_sd = math.radians(spec.phase_range_deg)
    if sigma == 0.0 and phase_sd == 0.0:
        return tensor.with_values(h.copy())
    g = counter_rng(spec.seed, trial_index, STREAM_PAL if tensor.kind == "pal" else STREAM_EDL)
    u_amp = g.standard_normal(h.shape)
    u_phase = g.standard_normal(h.shape)
    amp = np.maximum(np.abs(h) + sigma * u_amp, 0.0)
    return tensor.with_values(amp * np.exp(1j * (np.angle(h) + phase_sd * u_phase)))


@dataclass(frozen=True)
class RobustnessSummary:
    array_kind: str
    f_audio: float
    spec: PerturbationSpec
    contrasts: tuple[float, ...]
    errors: tuple[str, ...] = ()

    @property
    def valid(self) -> np.ndarray:
        c = np.asarray(self.contrasts, dtype=float)
        return c[np.isfinite(c)]

    @property
    def mean(self) -> float:
        return float(np.mean(self.valid)) if len(self.valid) else math.nan

    @property
    def std(self) -> float:
        return float(np.std(self.valid)) if len(self.valid) else math.nan

    @property
    def min(self) -> float:
        return float(np.min(self.valid)) if len(self.valid) else math.nan

    @property
    def max(self) -> float:
        return float(np.max(self.valid)) if len(self.valid) else math.nan


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    pal_db: float
    edl_db: float
    error: str = ""


def run_trial(
    pal: TransferTensor,
    edl: TransferTensor,
    bright,
    dark,
    spec: PerturbationSpec,
    trial: int,
    n_itr: int = 200,
    opt_seed: int = 0,
    ridge: float = 1e-10,
    evaluate_on: str = "perturbed",
) -> TrialOutcome:
    """One perturbation, then PAL and EDL optimisation and evaluation."""
    out = {}
    errors = []
    for kind, clean in (("pal", pal), ("edl", edl)):
        try:
            noisy = perturb_tensor(clean, spec, trial)
            if kind == "pal":
                res = acc_pal(noisy, bright, dark, n_itr=n_itr, seed=opt_seed, ridge=ridge)
            else:
                res = acc_edl(noisy, bright, dark, ridge=ridge)
            target = noisy if evaluate_on == "perturbed" else clean
            out[kind] = acoustic_contrast(target, res.drives, bright, dark)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            log.warning("trial %d %s failed: %s", trial, kind, exc)
            out[kind] = math.nan
            errors.append(f"{kind}: {exc}")
    return TrialOutcome(trial, out["pal"], out["edl"], "; ".join(errors))


@dataclass(frozen=True)
class CellResult:
    f_audio: float
    snr_db: float
    phase_range_deg: float
    trials: tuple[TrialOutcome, ...]
    pal: RobustnessSummary
    edl: RobustnessSummary


def sweep_cells(grid) -> list[tuple[float, float]]:
    """Cells for an SNR sweep at fixed phase range plus a phase sweep at fixed SNR.

    ``grid`` is a :class:`~palzone.model.RobustnessGrid`. Duplicates are
    dropped, first occurrence wins.
    """
    cells = [(float(s), float(grid.fixed_phase_deg)) for s in grid.snr_db]
    cells += [(float(grid.fixed_snr_db), float(r)) for r in grid.phase_range_deg]
    return list(dict.fromkeys(cells))


def run_robustness_sweep(
    config: ExperimentConfig,
    cells: Sequence[tuple[float, float]],
    frequencies: Sequence[float],
    tensors: Callable[[float], tuple[TransferTensor, TransferTensor]],
    n_trials: int | None = None,
    workers: int = 1,
) -> list[CellResult]:
    """Monte-Carlo sweep over ``(snr_db, phase_range_deg)`` cells.

    ``tensors(f)`` returns the clean ``(pal, edl)`` tensors for audio
    frequency ``f``. Results come back ordered by frequency, then cell, and
    each cell's trials by index, whatever ``workers`` is.
    """
    base = config.perturbation
    n_trials = base.n_trials if n_trials is None else n_trials
    opt = config.optimizer
    bright, dark = config.bright_index, config.dark_index
    results = []
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for f in frequencies:
            pal, edl = tensors(f)
            for snr, phase in cells:
                spec = replace(base, snr_db=snr, phase_range_deg=phase, n_trials=n_trials)

                def one(t, spec=spec):
                    return run_trial(
                        pal, edl, bright, dark, spec, t, opt.n_itr, opt.seed, opt.ridge, config.robustness.evaluate_on
                    )

                trials = tuple(pool.map(one, range(n_trials)) if pool else map(one, range(n_trials)))
                log.info("f=%g Hz snr=%g dB R=%g deg: %d trials done", f, snr, phase, n_trials)
                results.append(
                    CellResult(
                        f,
                        snr,
                        phase,
                        trials,
                        RobustnessSummary("pal", f, spec, tuple(t.pal_db for t in trials), _errs(trials, "pal")),
                        RobustnessSummary("edl", f, spec, tuple(t.edl_db for t in trials), _errs(trials, "edl")),
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def _errs(trials, kind) -> tuple[str, ...]:
    return tuple(f"trial {t.trial}: {t.error}" for t in trials if t.error and kind in t.error)
