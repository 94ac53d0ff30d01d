"""On-disk cache for transfer tensors and ultrasound field tables.

Each entry is a ``<key>.npz`` file. The archive holds a JSON header under
``header`` plus the arrays. Header fields:

    format   "palzone-cache"
    version  CACHE_VERSION; entries with another version are ignored
    kind     "pal-tensor" | "edl-tensor" | "ultrasound-table"
    key      SHA-256 of the canonical JSON of every input that shapes the data
    inputs   that canonical input record, for inspection

Arrays: ``values`` and ``control_points`` for tensors, ``points``, ``p1``
and ``p2`` for field tables.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .field import (
    QuadratureGrid,
    TransferTensor,
    UltrasoundFieldTable,
    assemble_edl_vector,
    pal_tensor_from_table,
    ultrasound_field,
)
from .model import ArrayGeometry, ExperimentConfig, FrequencyPlan, MediumParams, QuadratureSpec

log = logging.getLogger(__name__)

CACHE_FORMAT = "palzone-cache"
CACHE_VERSION = 1


def _canon(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _canon(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [_canon(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, float):
        return repr(obj)
    return obj


def cache_key(kind: str, **inputs: Any) -> tuple[str, dict]:
    record = {"kind": kind, "version": CACHE_VERSION, **{k: _canon(v) for k, v in sorted(inputs.items())}}
    text = json.dumps(record, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest(), record


class ArrayCache:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.npz"

    def load(self, key: str) -> dict[str, np.ndarray] | None:
        p = self.path(key)
        if not p.exists():
            return None
        try:
            with np.load(p, allow_pickle=False) as data:
                header = json.loads(str(data["header"]))
                if header.get("format") != CACHE_FORMAT or header.get("version") != CACHE_VERSION or header.get("key") != key:
                    log.warning("ignoring stale cache entry %s", p)
                    return None
                return {k: data[k] for k in data.files if k != "header"}
        except (OSError, ValueError, KeyError) as exc:
            log.warning("unreadable cache entry %s: %s", p, exc)
            return None

    def save(self, key: str, kind: str, record: dict, arrays: dict[str, np.ndarray]) -> None:
        header = {"format": CACHE_FORMAT, "version": CACHE_VERSION, "kind": kind, "key": key, "inputs": record}
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".npz.tmp")
        os.close(fd)
        with open(tmp, "wb") as fh:
            np.savez(fh, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
        os.replace(tmp, self.path(key))

    def get_or_build(self, kind: str, inputs: dict, build: Callable[[], dict[str, np.ndarray]]) -> dict[str, np.ndarray]:
        key, record = cache_key(kind, **inputs)
        hit = self.load(key)
        if hit is not None:
            log.debug("cache hit %s %s", kind, key[:12])
            return hit
        arrays = build()
        self.save(key, kind, record, arrays)
        return arrays


def _run(cache: ArrayCache | None, kind: str, inputs: dict, build):
    return build() if cache is None else cache.get_or_build(kind, inputs, build)


def field_table(
    geometry: ArrayGeometry, medium: MediumParams, plan: FrequencyPlan, quad: QuadratureSpec, cache: ArrayCache | None = None
) -> UltrasoundFieldTable:
    grid = QuadratureGrid.from_spec(quad)

    def build():
        t = ultrasound_field(geometry, medium, plan, grid)
        return {"points": t.points, "p1": t.p1, "p2": t.p2}

    inputs = dict(geometry=geometry, medium=medium, plan=plan, quad=quad)
    a = _run(cache, "ultrasound-table", inputs, build)
    return UltrasoundFieldTable(a["points"], a["p1"], a["p2"])


def pal_tensor(
    geometry: ArrayGeometry,
    medium: MediumParams,
    plan: FrequencyPlan,
    quad: QuadratureSpec,
    control_points: np.ndarray,
    cache: ArrayCache | None = None,
    workers: int = 1,
) -> TransferTensor:
    """Cached PAL tensor assembly. The field table itself is not cached here."""
    cp = np.asarray(control_points, dtype=float)

    def build():
        grid = QuadratureGrid.from_spec(quad)
        table = ultrasound_field(geometry, medium, plan, grid)
        values = pal_tensor_from_table(table, grid, medium, plan, cp, quad.refine, workers)
        return {"values": values, "control_points": cp}

    inputs = dict(geometry=geometry, medium=medium, plan=plan, quad=quad, control_points=cp)
    a = _run(cache, "pal-tensor", inputs, build)
    return TransferTensor("pal", a["values"], a["control_points"], plan.f_audio)


def edl_tensor(
    geometry: ArrayGeometry, medium: MediumParams, plan: FrequencyPlan, control_points: np.ndarray, cache: ArrayCache | None = None
) -> TransferTensor:
    cp = np.asarray(control_points, dtype=float)

    def build():
        return {"values": assemble_edl_vector(geometry, medium, plan, cp).values, "control_points": cp}

    inputs = dict(geometry=geometry, medium=medium, plan=plan, control_points=cp)
    a = _run(cache, "edl-tensor", inputs, build)
    return TransferTensor("edl", a["values"], a["control_points"], plan.f_audio)


def clean_tensors(config: ExperimentConfig, f_audio: float, cache: ArrayCache | None = None, workers: int = 1):
    """Unperturbed ``(pal, edl)`` tensors on the config's control points (bright first)."""
    plan = config.plan(f_audio)
    cp = config.control_points
    pal = pal_tensor(config.array, config.medium, plan, config.quadrature, cp, cache, workers)
    edl = edl_tensor(config.array, config.medium, plan, cp, cache)
    return pal, edl
