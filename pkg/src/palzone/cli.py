"""Command-line entry point.

    palzone <fields|convergence|contrast-table|robustness> --config PATH --out DIR
            [--seed N] [--force] [--cache-dir PATH] [--set key=value ...]

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import shutil
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, experiments, svg
from .acc import OptimizerError
from .cache import ArrayCache
from .model import ConfigError, ExperimentConfig, load_config

log = logging.getLogger("palzone")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("fields", "convergence", "contrast-table", "robustness")


@dataclass(frozen=True)
class ExperimentManifest:
    kind: str
    config_path: str | None
    out_dir: Path
    seed: int | None = None
    overrides: tuple[str, ...] = ()
    force: bool = False
    cache_dir: str | None = None
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def load(self) -> ExperimentConfig:
        overrides = list(self.overrides)
        if self.seed is not None:
            overrides += [f"optimizer.seed={self.seed}", f"perturbation.seed={self.seed}"]
        return load_config(self.config_path, overrides)

    def cache(self) -> ArrayCache | None:
        return ArrayCache(self.cache_dir) if self.cache_dir else None


def _num(v: float) -> str:
    return repr(float(v))


def _write_csv(path: Path, header: Sequence[str], rows, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fhz(f: float) -> str:
    return f"{int(round(f))}Hz"


class OutputExists(Exception):
    pass


def _atomic_output(out: Path, force: bool, fill: Callable[[Path], None]) -> None:
    """Write everything into a sibling temp dir, then move it into place."""
    out = out.resolve()
    if out.exists() and not force:
        raise OutputExists(f"{out} exists; pass --force to replace it")
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        fill(tmp)
        if out.exists():
            shutil.rmtree(out)
        tmp.rename(out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def _write_manifest(d: Path, m: ExperimentManifest, cfg: ExperimentConfig) -> None:
    record = {
        "command": m.kind,
        "version": __version__,
        "seed": m.seed,
        "overrides": list(m.overrides),
        "config": cfg.to_dict(),
    }
    text = json.dumps(record, indent=2, sort_keys=True)
    (d / "manifest.json").write_text(text + "\n")


def cmd_convergence(m: ExperimentManifest) -> None:
    cfg = m.load()
    results = experiments.convergence(cfg, m.cache(), m.workers)

    def fill(d: Path) -> None:
        rows = []
        series = []
        for f, res in results.items():
            for i, c in enumerate(res.history, start=1):
                rows.append([_num(f), i, _num(c)])
            series.append({"label": f"{f / 1e3:g} kHz", "x": np.arange(1, len(res.history) + 1), "y": res.history})
        _write_csv(d / "convergence.csv", ["frequency_hz", "iteration", "contrast_db"], rows)
        (d / "convergence.svg").write_text(svg.line_plot(series, "PAL contrast vs iteration", "iteration", "acoustic contrast (dB)"))
        _write_manifest(d, m, cfg)

    _atomic_output(m.out_dir, m.force, fill)


def cmd_contrast_table(m: ExperimentManifest) -> None:
    cfg = m.load()
    rows = experiments.contrast_table(cfg, m.cache(), m.workers)
    p = cfg.perturbation

    def fill(d: Path) -> None:
        _write_csv(
            d / "contrast_table.csv",
            ["frequency_hz", "array_kind", "contrast_db", "snr_db", "phase_range_deg", "seed"],
            [[_num(f), k, _num(c), _num(p.snr_db), _num(p.phase_range_deg), p.seed] for f, k, c in rows],
        )
        _write_manifest(d, m, cfg)

    _atomic_output(m.out_dir, m.force, fill)


def cmd_fields(m: ExperimentManifest) -> None:
    cfg = m.load()
    maps = experiments.fields(cfg, m.cache(), m.workers)
    b, dk = cfg.bright, cfg.dark

    def fill(d: Path) -> None:
        summary = []
        for fm in maps:
            stem = f"field_{fm.kind}_{_fhz(fm.f_audio)}"
            zz, xx = np.meshgrid(fm.z, fm.x, indexing="ij")
            rows = ([_num(a), _num(c), _num(v)] for a, c, v in zip(xx.ravel(), zz.ravel(), fm.spl.ravel()))
            comment = f"nx={len(fm.x)} nz={len(fm.z)} step_m={cfg.render.step!r} frequency_hz={fm.f_audio!r} array_kind={fm.kind}"
            _write_csv(d / f"{stem}.csv", ["x_m", "z_m", "spl_db"], rows, comment)
            vmax = float(np.ceil(np.max(fm.spl) / 5.0) * 5.0)
            title = f"{fm.kind.upper()} {fm.f_audio / 1e3:g} kHz, SPL dB re 20 uPa"
            boxes = [(b.x_min, b.x_max, b.z_min, b.z_max, "#ffffff"), (dk.x_min, dk.x_max, dk.z_min, dk.z_max, "#000000")]
            (d / f"{stem}.svg").write_text(svg.heatmap(fm.x, fm.z, fm.spl, title, vmax - 60.0, vmax, boxes))
            summary.append([_num(fm.f_audio), fm.kind, _num(fm.bright_mean_db), _num(fm.dark_mean_db), _num(fm.contrast_db)])
        _write_csv(
            d / "fields_summary.csv",
            ["frequency_hz", "array_kind", "bright_mean_spl_db", "dark_mean_spl_db", "contrast_db"],
            summary,
        )
        _write_manifest(d, m, cfg)

    _atomic_output(m.out_dir, m.force, fill)


def cmd_robustness(m: ExperimentManifest) -> None:
    cfg = m.load()
    cells = experiments.robustness(cfg, m.cache(), m.workers)
    grid = cfg.robustness

    def fill(d: Path) -> None:
        trial_rows = []
        summary_rows = []
        for c in cells:
            for t in c.trials:
                trial_rows.append([_num(c.f_audio), _num(c.snr_db), _num(c.phase_range_deg), t.trial, "pal", _num(t.pal_db)])
                trial_rows.append([_num(c.f_audio), _num(c.snr_db), _num(c.phase_range_deg), t.trial, "edl", _num(t.edl_db)])
            for s in (c.pal, c.edl):
                summary_rows.append(
                    [_num(c.f_audio), _num(c.snr_db), _num(c.phase_range_deg), s.array_kind, len(s.valid), len(s.errors)]
                    + [_num(v) for v in (s.mean, s.std, s.min, s.max)]
                )
        _write_csv(
            d / "robustness_trials.csv",
            ["frequency_hz", "snr_db", "phase_range_deg", "trial", "array_kind", "contrast_db"],
            trial_rows,
        )
        _write_csv(
            d / "robustness_summary.csv",
            ["frequency_hz", "snr_db", "phase_range_deg", "array_kind", "n", "n_failed", "mean_db", "std_db", "min_db", "max_db"],
            summary_rows,
        )
        for f in cfg.audio_frequencies:
            for axis, pick in (
                ("snr", lambda c: c.phase_range_deg == grid.fixed_phase_deg and c.snr_db in grid.snr_db),
                ("phase", lambda c: c.snr_db == grid.fixed_snr_db and c.phase_range_deg in grid.phase_range_deg),
            ):
                sel = sorted((c for c in cells if c.f_audio == f and pick(c)), key=lambda c: c.snr_db if axis == "snr" else c.phase_range_deg)
                if not sel:
                    continue
                xs = [c.snr_db if axis == "snr" else c.phase_range_deg for c in sel]
                series = [
                    {"label": "PAL", "x": xs, "y": [c.pal.mean for c in sel], "err": [c.pal.std for c in sel]},
                    {"label": "EDL", "x": xs, "y": [c.edl.mean for c in sel], "err": [c.edl.std for c in sel]},
                ]
                if axis == "snr":
                    title, xlabel = f"{f / 1e3:g} kHz, R = {grid.fixed_phase_deg:g} deg", "SNR of amplitude perturbation (dB)"
                else:
                    title, xlabel = f"{f / 1e3:g} kHz, SNR = {grid.fixed_snr_db:g} dB", "phase perturbation range R (deg)"
                (d / f"robustness_vs_{axis}_{_fhz(f)}.svg").write_text(svg.line_plot(series, title, xlabel, "acoustic contrast (dB)"))
        _write_manifest(d, m, cfg)

    _atomic_output(m.out_dir, m.force, fill)


HANDLERS = {
    "fields": cmd_fields,
    "convergence": cmd_convergence,
    "contrast-table": cmd_contrast_table,
    "robustness": cmd_robustness,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="palzone", description="Sound zone control with PAL and EDL arrays.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="TOML configuration file (defaults apply when omitted)")
    p.add_argument("--out", required=True, help="output directory (must not exist unless --force)")
    p.add_argument("--seed", type=int, help="seed for both the perturbation and the optimizer")
    p.add_argument("--force", action="store_true", help="replace an existing output directory")
    p.add_argument("--cache-dir", help="reuse transfer tensors across runs")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override a config field")
    p.add_argument("--workers", type=int, default=1, help="threads for tensor assembly and trials")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _fail(code: int, kind: str, messages: Sequence[str]) -> int:
    sys.stderr.write(json.dumps({"error": kind, "exit_code": code, "messages": list(messages)}) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    manifest = ExperimentManifest(
        args.command, args.config, Path(args.out), args.seed, tuple(args.overrides), args.force, args.cache_dir, max(1, args.workers)
    )
    try:
        HANDLERS[args.command](manifest)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc.errors)
    except OutputExists as exc:
        return _fail(EXIT_CONFIG, "output", [str(exc)])
    except (OptimizerError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERIC, "numerical", [f"{type(exc).__name__}: {exc}"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
