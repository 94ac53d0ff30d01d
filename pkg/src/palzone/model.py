"""Physical parameters, geometry, zones and experiment configuration.

Every type here is a frozen dataclass. Constructors do not validate; use
:func:`validate_config` (or the per-type ``problems`` methods) so that all
violations can be reported at once.
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

P_REF_PA = 20e-6


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants.

    ``errors`` holds one ``"<field path>: <message>"`` string per violation.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class MediumParams:
    rho0: float = 1.21
    c0: float = 343.0
    beta: float = 1.2
    temperature: float = 20.0
    humidity: float = 70.0
    pressure_kpa: float = 101.325
    alpha_override: float | None = None

    def problems(self, path: str = "medium") -> list[str]:
        out = []
        for name in ("rho0", "c0", "beta", "pressure_kpa"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                out.append(f"{path}.{name}: {name} > 0 violated")
        if not (0.0 <= self.humidity <= 100.0):
            out.append(f"{path}.humidity: humidity in [0, 100] violated")
        if not math.isfinite(self.temperature) or self.temperature <= -273.15:
            out.append(f"{path}.temperature: temperature above absolute zero violated")
        if self.alpha_override is not None and not (
            math.isfinite(self.alpha_override) and self.alpha_override >= 0
        ):
            out.append(f"{path}.alpha_override: alpha_override >= 0 violated")
        return out


def iso9613_absorption(f, temperature=20.0, humidity=70.0, pressure_kpa=101.325):
    """Pure-tone atmospheric absorption of ISO 9613-1, in Np/m.

    The standard states the result in dB/m as ``8.686 * f^2 * [...]``;
    dropping the 8.686 factor (= 20 log10 e) gives nepers.
    """
    f = np.asarray(f, dtype=float)
    t_k = temperature + 273.15
    t_ref = 293.15
    t_01 = 273.16
    p_rel = pressure_kpa / 101.325
    t_rel = t_k / t_ref

    c_sat = -6.8346 * (t_01 / t_k) ** 1.261 + 4.6151
    h = humidity * 10.0**c_sat / p_rel  # molar concentration of water vapour, %

    fr_o = p_rel * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h))
    fr_n = p_rel * t_rel**-0.5 * (9.0 + 280.0 * h * math.exp(-4.170 * (t_rel ** (-1.0 / 3.0) - 1.0)))

    bracket = 1.84e-11 / p_rel * t_rel**0.5 + t_rel**-2.5 * (
        0.01275 * math.exp(-2239.1 / t_k) / (fr_o + f**2 / fr_o)
        + 0.1068 * math.exp(-3352.0 / t_k) / (fr_n + f**2 / fr_n)
    )
    return f**2 * bracket


def absorption_coefficient(medium: MediumParams, f):
    """Absorption of ``medium`` at frequency ``f`` (Hz), in Np/m."""
    f_arr = np.asarray(f, dtype=float)
    if np.any(~np.isfinite(f_arr)) or np.any(f_arr <= 0):
        raise ValueError("frequency must be positive")
    if medium.alpha_override is not None:
        out = np.full_like(f_arr, float(medium.alpha_override))
    else:
        out = iso9613_absorption(f_arr, medium.temperature, medium.humidity, medium.pressure_kpa)
    return out if out.ndim else float(out)


def wavenumber(medium: MediumParams, f: float) -> complex:
    """Complex wavenumber ``2 pi f / c0 + i alpha(f)``."""
    return 2.0 * math.pi * f / medium.c0 + 1j * absorption_coefficient(medium, f)


@dataclass(frozen=True)
class FrequencyPlan:
    """Two carriers placed symmetrically about ``f_center``."""

    f_center: float = 40e3
    f_audio: float = 1e3

    @property
    def f1(self) -> float:
        return self.f_center - 0.5 * self.f_audio

    @property
    def f2(self) -> float:
        return self.f1 + self.f_audio

    @property
    def omega_audio(self) -> float:
        return 2.0 * math.pi * self.f_audio

    def omega(self, carrier: int) -> float:
        return 2.0 * math.pi * (self.f1 if carrier == 1 else self.f2)

    def k_audio(self, c0: float) -> float:
        return self.omega_audio / c0

    def problems(self, path: str = "plan") -> list[str]:
        out = []
        if not (math.isfinite(self.f_audio) and self.f_audio > 0):
            out.append(f"{path}.f_audio: f_audio > 0 violated")
        if not (math.isfinite(self.f_center) and self.f_center > 0):
            out.append(f"{path}.f_center: f_center > 0 violated")
        if not out:
            if not self.f1 > 0:
                out.append(f"{path}.f1: f1 > 0 violated")
            if not self.f_audio < self.f_center:
                out.append(f"{path}.f_audio: f_audio < f_center violated")
        return out


@dataclass(frozen=True)
class ArrayGeometry:
    """Line array of equal-width strip sources on the z = 0 plane."""

    n_elements: int
    element_width: float
    element_centers: tuple[float, ...]
    v0: float = 1.0

    @classmethod
    def uniform(cls, n_elements: int = 24, element_width: float = 0.01, gap: float = 0.0, v0: float = 1.0):
        """Evenly spaced elements with the array centroid at x = 0."""
        pitch = element_width + gap
        centers = tuple(float((i - 0.5 * (n_elements - 1)) * pitch) for i in range(n_elements))
        return cls(n_elements, element_width, centers, v0)

    @property
    def centers(self) -> np.ndarray:
        return np.asarray(self.element_centers, dtype=float)

    @property
    def aperture(self) -> tuple[float, float]:
        c = self.centers
        return float(c[0] - 0.5 * self.element_width), float(c[-1] + 0.5 * self.element_width)

    def problems(self, path: str = "array") -> list[str]:
        out = []
        if self.n_elements < 1:
            out.append(f"{path}.n_elements: n_elements >= 1 violated")
        if not (math.isfinite(self.element_width) and self.element_width > 0):
            out.append(f"{path}.element_width: element_width > 0 violated")
        if not math.isfinite(self.v0) or self.v0 < 0:
            out.append(f"{path}.v0: v0 >= 0 violated")
        c = np.asarray(self.element_centers, dtype=float)
        if len(c) != self.n_elements:
            out.append(f"{path}.element_centers: length equals n_elements violated")
        elif len(c) > 1:
            d = np.diff(c)
            if np.any(d <= 0):
                out.append(f"{path}.element_centers: strictly increasing violated")
            # 1e-12 slack: a zero gap built from floats may land a hair below the width
            elif np.any(d < self.element_width * (1 - 1e-12)):
                out.append(f"{path}.element_centers: spacing >= element_width violated")
        return out


@dataclass(frozen=True)
class Zone:
    x_min: float
    x_max: float
    z_min: float
    z_max: float
    nx: int = 10
    nz: int = 10

    @property
    def control_points(self) -> np.ndarray:
        """``(nx*nz, 2)`` array of (x, z), x varying fastest. Endpoints included."""
        xs = _axis(self.x_min, self.x_max, self.nx)
        zs = _axis(self.z_min, self.z_max, self.nz)
        zz, xx = np.meshgrid(zs, xs, indexing="ij")
        return np.column_stack([xx.ravel(), zz.ravel()])

    @property
    def n_points(self) -> int:
        return self.nx * self.nz

    def contains(self, x, z):
        return (x >= self.x_min) & (x <= self.x_max) & (z >= self.z_min) & (z <= self.z_max)

    def problems(self, path: str = "zone") -> list[str]:
        out = []
        if not self.x_min < self.x_max:
            out.append(f"{path}.x_min: x_min < x_max violated")
        if not self.z_min < self.z_max:
            out.append(f"{path}.z_min: z_min < z_max violated")
        if self.z_min <= 0:
            out.append(f"{path}.z_min: zone above the source plane (z_min > 0) violated")
        if self.nx < 1:
            out.append(f"{path}.nx: nx >= 1 violated")
        if self.nz < 1:
            out.append(f"{path}.nz: nz >= 1 violated")
        return out


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncated virtual-source integration domain.

    The domain is tiled by cells of exactly ``dx`` by ``dz``; the upper
    bounds are rounded up to a whole number of cells. Rows within
    ``near_band`` of ``z_min`` use cells ``near_refine`` times smaller in
    each direction (1 disables this). ``rule`` is the number of Gauss
    nodes per cell side: 1 is the midpoint rule, 2 the 2x2 Gauss rule.
    """

    x_min: float = -0.75
    x_max: float = 0.75
    z_min: float = 0.001
    z_max: float = 1.2
    dx: float = 0.005
    dz: float = 0.005
    refine: int = 4
    near_band: float = 0.02
    near_refine: int = 4
    rule: int = 2

    def problems(self, path: str = "quadrature") -> list[str]:
        out = []
        if not (self.dx > 0 and self.dz > 0):
            out.append(f"{path}.dx: spacing > 0 violated")
        if not self.x_min < self.x_max:
            out.append(f"{path}.x_min: x_min < x_max violated")
        if not self.z_min < self.z_max:
            out.append(f"{path}.z_min: z_min < z_max violated")
        if self.z_min < 0:
            out.append(f"{path}.z_min: z_min >= 0 violated")
        if self.refine < 1:
            out.append(f"{path}.refine: refine >= 1 violated")
        if self.near_refine < 1:
            out.append(f"{path}.near_refine: near_refine >= 1 violated")
        if not self.near_band >= 0:
            out.append(f"{path}.near_band: near_band >= 0 violated")
        if self.rule not in (1, 2):
            out.append(f"{path}.rule: rule in {{1, 2}} violated")
        return out


@dataclass(frozen=True)
class RenderGrid:
    """Cell-centred evaluation grid for SPL maps."""

    x_min: float = -1.0
    x_max: float = 1.0
    z_min: float = 0.0
    z_max: float = 1.2
    step: float = 0.005

    @property
    def x(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.step))
        return self.x_min + (np.arange(n) + 0.5) * self.step

    @property
    def z(self) -> np.ndarray:
        n = int(round((self.z_max - self.z_min) / self.step))
        return self.z_min + (np.arange(n) + 0.5) * self.step

    def problems(self, path: str = "render") -> list[str]:
        out = []
        if not self.step > 0:
            out.append(f"{path}.step: step > 0 violated")
        if not (self.x_min < self.x_max and self.z_min < self.z_max):
            out.append(f"{path}.x_min: non-empty render rectangle violated")
        if self.z_min < 0:
            out.append(f"{path}.z_min: z_min >= 0 violated")
        return out


@dataclass(frozen=True)
class OptimizerParams:
    n_itr: int = 200
    seed: int = 0
    ridge: float = 1e-10
    n_starts: int = 1

    def problems(self, path: str = "optimizer") -> list[str]:
        out = []
        if self.n_itr < 1:
            out.append(f"{path}.n_itr: n_itr >= 1 violated")
        if not self.ridge >= 0:
            out.append(f"{path}.ridge: ridge >= 0 violated")
        if self.n_starts < 1:
            out.append(f"{path}.n_starts: n_starts >= 1 violated")
        return out


@dataclass(frozen=True)
class PerturbationSpec:
    """Amplitude/phase noise applied to transfer functions.

    ``snr_db = inf`` disables amplitude noise; ``phase_range_deg`` is the
    standard deviation of the phase noise in degrees.
    """

    snr_db: float = 30.0
    phase_range_deg: float = 15.0
    seed: int = 0
    n_trials: int = 100

    def problems(self, path: str = "perturbation") -> list[str]:
        out = []
        if self.n_trials < 1:
            out.append(f"{path}.n_trials: n_trials >= 1 violated")
        if not self.phase_range_deg >= 0:
            out.append(f"{path}.phase_range_deg: phase_range_deg >= 0 violated")
        if math.isnan(self.snr_db):
            out.append(f"{path}.snr_db: snr_db is a number violated")
        return out


@dataclass(frozen=True)
class RobustnessGrid:
    snr_db: tuple[float, ...] = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0)
    phase_range_deg: tuple[float, ...] = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0)
    fixed_phase_deg: float = 15.0
    fixed_snr_db: float = 30.0
    evaluate_on: str = "perturbed"

    def problems(self, path: str = "robustness") -> list[str]:
        out = []
        if self.evaluate_on not in ("perturbed", "clean"):
            out.append(f"{path}.evaluate_on: one of perturbed|clean violated")
        if any(r < 0 for r in self.phase_range_deg) or self.fixed_phase_deg < 0:
            out.append(f"{path}.phase_range_deg: phase ranges >= 0 violated")
        return out


def _default_bright() -> Zone:
    return Zone(-0.6, -0.3, 0.6, 0.9, 10, 10)


def _default_dark() -> Zone:
    return Zone(0.3, 0.6, 0.6, 0.9, 10, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    medium: MediumParams = field(default_factory=MediumParams)
    f_center: float = 40e3
    audio_frequencies: tuple[float, ...] = (1e3, 2e3, 4e3, 8e3)
    array: ArrayGeometry = field(default_factory=ArrayGeometry.uniform)
    bright: Zone = field(default_factory=_default_bright)
    dark: Zone = field(default_factory=_default_dark)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    render: RenderGrid = field(default_factory=RenderGrid)
    optimizer: OptimizerParams = field(default_factory=OptimizerParams)
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    robustness: RobustnessGrid = field(default_factory=RobustnessGrid)

    def plan(self, f_audio: float) -> FrequencyPlan:
        return FrequencyPlan(self.f_center, f_audio)

    @property
    def plans(self) -> list[FrequencyPlan]:
        return [self.plan(f) for f in self.audio_frequencies]

    @property
    def control_points(self) -> np.ndarray:
        """Bright-zone points followed by dark-zone points."""
        return np.vstack([self.bright.control_points, self.dark.control_points])

    @property
    def bright_index(self) -> np.ndarray:
        return np.arange(self.bright.n_points)

    @property
    def dark_index(self) -> np.ndarray:
        return np.arange(self.bright.n_points, self.bright.n_points + self.dark.n_points)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["array"]["element_centers"] = list(self.array.element_centers)
        return d


_SECTIONS = {
    "medium": MediumParams,
    "bright": Zone,
    "dark": Zone,
    "quadrature": QuadratureSpec,
    "render": RenderGrid,
    "optimizer": OptimizerParams,
    "perturbation": PerturbationSpec,
    "robustness": RobustnessGrid,
}


def _build(cls, raw: Mapping[str, Any], path: str, errors: list[str], default=None):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - names
    for key in sorted(unknown):
        errors.append(f"{path}.{key}: unknown field")
    kwargs = dataclasses.asdict(default) if default is not None else {}
    kwargs.update((k, v) for k, v in raw.items() if k in names)
    for k, v in kwargs.items():
        if isinstance(v, list):
            kwargs[k] = tuple(float(x) for x in v)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        errors.append(f"{path}: {exc}")
        return None


def _build_array(raw: Mapping[str, Any], errors: list[str]) -> ArrayGeometry | None:
    raw = dict(raw)
    allowed = {"n_elements", "element_width", "gap", "v0", "element_centers"}
    for key in sorted(set(raw) - allowed):
        errors.append(f"array.{key}: unknown field")
    n = int(raw.get("n_elements", 24))
    width = float(raw.get("element_width", 0.01))
    v0 = float(raw.get("v0", 1.0))
    centers = raw.get("element_centers")
    if centers is None:
        gap = float(raw.get("gap", 0.0))
        if gap < 0:
            errors.append("array.gap: gap >= 0 violated")
            return None
        return ArrayGeometry.uniform(n, width, gap, v0)
    return ArrayGeometry(n, width, tuple(float(c) for c in centers), v0)


def validate_config(config: ExperimentConfig | Mapping[str, Any] | None = None) -> ExperimentConfig:
    """Build and check an :class:`ExperimentConfig`.

    ``config`` may be a nested mapping (as loaded from TOML; missing keys
    take their defaults) or an existing config, which is re-checked and
    returned unchanged when valid. Raises :class:`ConfigError` listing
    every violated invariant.
    """
    if isinstance(config, ExperimentConfig):
        raw: Mapping[str, Any] = config.to_dict()
    else:
        raw = dict(config or {})

    errors: list[str] = []
    kwargs: dict[str, Any] = {}
    top = {"f_center", "audio_frequencies", "array", *_SECTIONS}
    for key in sorted(set(raw) - top):
        errors.append(f"{key}: unknown section")

    base = ExperimentConfig()
    for name, cls in _SECTIONS.items():
        if name in raw:
            obj = _build(cls, raw[name], name, errors, getattr(base, name))
            if obj is not None:
                kwargs[name] = obj
    if "array" in raw:
        geom = _build_array(raw["array"], errors)
        if geom is not None:
            kwargs["array"] = geom
    if "f_center" in raw:
        kwargs["f_center"] = float(raw["f_center"])
    if "audio_frequencies" in raw:
        kwargs["audio_frequencies"] = tuple(float(f) for f in raw["audio_frequencies"])
    if errors:
        raise ConfigError(errors)

    cfg = ExperimentConfig(**kwargs)
    errors += cfg.medium.problems("medium")
    errors += cfg.array.problems("array")
    errors += cfg.bright.problems("bright")
    errors += cfg.dark.problems("dark")
    errors += cfg.quadrature.problems("quadrature")
    errors += cfg.render.problems("render")
    errors += cfg.optimizer.problems("optimizer")
    errors += cfg.perturbation.problems("perturbation")
    errors += cfg.robustness.problems("robustness")
    if not cfg.audio_frequencies:
        errors.append("audio_frequencies: at least one frequency violated")
    for i, plan in enumerate(cfg.plans):
        errors += plan.problems(f"audio_frequencies[{i}]")

    q = cfg.quadrature
    if not errors:
        lo, hi = cfg.array.aperture
        if q.x_min > lo or q.x_max < hi:
            errors.append("quadrature.x_min: domain encloses the array aperture violated")
        if q.z_min >= min(cfg.bright.z_min, cfg.dark.z_min):
            errors.append("quadrature.z_min: domain starts below both zones violated")
    if errors:
        raise ConfigError(errors)
    return cfg


def _set_path(d: dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    for k in keys[:-1]:
        d = d.setdefault(k, {})
    d[keys[-1]] = value


def parse_override(item: str) -> tuple[str, Any]:
    """Split ``key=value`` with the value parsed as a TOML literal if possible."""
    if "=" not in item:
        raise ConfigError([f"{item}: override must be key=value"])
    key, text = item.split("=", 1)
    try:
        value = tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        value = text
    return key.strip(), value


def load_config(path: str | Path | None = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Read a TOML config, apply ``key=value`` overrides and validate."""
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError([f"config: cannot read {path}: {exc.strerror}"]) from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError([f"config: {exc}"]) from exc
    if "zones" in raw:
        zones = raw.pop("zones")
        for name in ("bright", "dark"):
            if name in zones:
                raw[name] = zones[name]
    for item in overrides:
        key, value = parse_override(item)
        key = key.replace("zones.", "", 1) if key.startswith("zones.") else key
        _set_path(raw, key, value)
    return validate_config(raw)
