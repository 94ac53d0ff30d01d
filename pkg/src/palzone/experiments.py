"""The four experiments: convergence, contrast table, field maps, robustness.

Each function is a pure function of the config (and cache contents, which
are themselves deterministic); file output lives in :mod:`palzone.cli`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .acc import ContrastResult, acc_edl, acc_pal, acoustic_contrast
from .cache import ArrayCache, clean_tensors, field_table
from .field import TransferTensor, edl_audio_field, pal_audio_field, spl_db
from .model import ExperimentConfig
from .robustness import CellResult, perturb_tensor, run_robustness_sweep, sweep_cells

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesignRun:
    f_audio: float
    pal: ContrastResult
    edl: ContrastResult
    pal_tensor: TransferTensor  # the tensor the contrast was evaluated on
    edl_tensor: TransferTensor


def design(config: ExperimentConfig, f_audio: float, cache: ArrayCache | None = None, workers: int = 1, trial: int = 0) -> DesignRun:
    """Optimise PAL and EDL drives on perturbed tensors (trial ``trial``)."""
    pal, edl = clean_tensors(config, f_audio, cache, workers)
    spec = config.perturbation
    pal_p = perturb_tensor(pal, spec, trial)
    edl_p = perturb_tensor(edl, spec, trial)
    b, d = config.bright_index, config.dark_index
    opt = config.optimizer
    r_pal = acc_pal(pal_p, b, d, opt.n_itr, opt.seed, opt.ridge, opt.n_starts)
    r_edl = acc_edl(edl_p, b, d, opt.ridge)
    if config.robustness.evaluate_on == "clean":
        pal_eval, edl_eval = pal, edl
        r_pal = _reevaluate(r_pal, pal, b, d)
        r_edl = _reevaluate(r_edl, edl, b, d)
    else:
        pal_eval, edl_eval = pal_p, edl_p
    log.info("f=%g Hz: PAL %.2f dB, EDL %.2f dB", f_audio, r_pal.contrast_db, r_edl.contrast_db)
    return DesignRun(f_audio, r_pal, r_edl, pal_eval, edl_eval)


def _reevaluate(res: ContrastResult, tensor, b, d) -> ContrastResult:
    c = acoustic_contrast(tensor, res.drives, b, d)
    return ContrastResult(res.drives, c, res.history, res.iterations_run, res.degenerate_steps, {"design_contrast_db": res.contrast_db})


def convergence(config: ExperimentConfig, cache=None, workers: int = 1) -> dict[float, ContrastResult]:
    """PAL contrast history per audio frequency."""
    return {f: design(config, f, cache, workers).pal for f in config.audio_frequencies}


def contrast_table(config: ExperimentConfig, cache=None, workers: int = 1) -> list[tuple[float, str, float]]:
    rows = []
    for f in config.audio_frequencies:
        run = design(config, f, cache, workers)
        rows.append((f, "pal", run.pal.contrast_db))
        rows.append((f, "edl", run.edl.contrast_db))
    return rows


@dataclass(frozen=True)
class FieldMap:
    f_audio: float
    kind: str
    x: np.ndarray
    z: np.ndarray
    spl: np.ndarray  # (nz, nx) dB re 20 uPa
    bright_mean_db: float
    dark_mean_db: float
    contrast_db: float


def _zone_mean(spl, x, z, zone) -> float:
    zz, xx = np.meshgrid(z, x, indexing="ij")
    mask = zone.contains(xx, zz)
    if not mask.any():
        return float("nan")
    return float(np.mean(spl[mask]))


def fields(config: ExperimentConfig, cache=None, workers: int = 1) -> list[FieldMap]:
    """Free-field SPL maps of the optimised PAL and EDL arrays."""
    out = []
    x, z = config.render.x, config.render.z
    for f in config.audio_frequencies:
        run = design(config, f, cache, workers)
        plan = config.plan(f)
        table = field_table(config.array, config.medium, plan, config.quadrature, cache)
        maps = {
            "pal": pal_audio_field(config.array, config.medium, plan, config.quadrature, run.pal.drives, x, z, table),
            "edl": edl_audio_field(config.array, config.medium, plan, run.edl.drives, x, z),
        }
        for kind, p in maps.items():
            spl = spl_db(p)
            c = run.pal.contrast_db if kind == "pal" else run.edl.contrast_db
            out.append(FieldMap(f, kind, x, z, spl, _zone_mean(spl, x, z, config.bright), _zone_mean(spl, x, z, config.dark), c))
    return out


def robustness(config: ExperimentConfig, cache=None, workers: int = 1) -> list[CellResult]:
    cells = sweep_cells(config.robustness)
    return run_robustness_sweep(
        config,
        cells,
        config.audio_frequencies,
        lambda f: clean_tensors(config, f, cache, workers),
        workers=workers,
    )

