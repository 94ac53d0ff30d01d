"""Ultrasound fields, virtual-source density and transfer tensors.

Conventions: time dependence ``exp(-i w t)``; the field plane is (x, z)
with the sources on z = 0 and air in z > 0. Complex amplitudes are peak
values.

A strip source of width ``a`` centred at ``c`` with surface velocity
``v0`` radiates

    p(r) = (rho0 w v0 / 2) * int_{c-a/2}^{c+a/2} H0(k |r - (x', 0)|) dx'

and the audio pressure from a virtual-source density ``q`` is

    p_a(r) = (rho0 w_a / 4) * iint q(r_v) H0(k_a |r - r_v|) d^2 r_v.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    P_REF_PA,
    ArrayGeometry,
    FrequencyPlan,
    MediumParams,
    QuadratureSpec,
    wavenumber,
)
from .special import EULER_GAMMA, hankel1_0_unchecked

GAUSS_NODES_PER_PANEL = 8
SPL_FLOOR_DB = -120.0
_POINT_CHUNK = 2048
_GRID_CHUNK = 4096
_BLOCK = 16


@dataclass(frozen=True)
class GridPatch:
    """Uniform lattice of quadrature nodes with spacing ``dx`` by ``dz``.

    Each node carries the weight of a box of ``box_size`` whose centre sits
    at ``box_offset`` from the node. For the midpoint rule the box is the
    whole cell; for the 2x2 Gauss rule it is the quadrant holding the node.
    The box is used to integrate the audio kernel near its singularity.
    """

    x: np.ndarray
    z: np.ndarray
    dx: float
    dz: float
    box_offset: tuple[float, float] = (0.0, 0.0)
    box_size: tuple[float, float] | None = None

    @property
    def box(self) -> tuple[float, float]:
        return self.box_size if self.box_size is not None else (self.dx, self.dz)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.z), len(self.x)

    @property
    def size(self) -> int:
        return len(self.z) * len(self.x)

    @property
    def points(self) -> np.ndarray:
        """``(nz*nx, 2)`` points, x varying fastest."""
        zz, xx = np.meshgrid(self.z, self.x, indexing="ij")
        return np.column_stack([xx.ravel(), zz.ravel()])

    @property
    def cell_area(self) -> float:
        bw, bh = self.box
        return bw * bh

    def kernel(self, k: complex, ddx, ddz, refine: int) -> np.ndarray:
        """Weighted audio kernel from nodes at offsets ``(ddx, ddz)``."""
        return cell_kernel(k, ddx, ddz, *self.box, refine, self.box_offset, math.hypot(self.dx, self.dz))


# node positions and their box centres on [-1/2, 1/2], per rule order
_RULES = {
    1: ((0.0,), (0.0,)),
    2: ((-0.5 / math.sqrt(3.0), 0.5 / math.sqrt(3.0)), (-0.25, 0.25)),
}


def _patches(x0: float, x1: float, z0: float, nz: int, dx: float, dz: float, order: int) -> list[GridPatch]:
    nx = max(1, math.ceil((x1 - x0) / dx - 1e-9))
    xc = x0 + (np.arange(nx) + 0.5) * dx
    zc = z0 + (np.arange(nz) + 0.5) * dz
    nodes, centres = _RULES[order]
    box = None if order == 1 else (dx / order, dz / order)
    out = []
    for tz, cz in zip(nodes, centres):
        for tx, cx in zip(nodes, centres):
            off = ((cx - tx) * dx, (cz - tz) * dz)
            out.append(GridPatch(xc + tx * dx, zc + tz * dz, dx, dz, off, box))
    return out


@dataclass(frozen=True)
class QuadratureGrid:
    """Virtual-source integration grid made of uniform patches.

    The rows within ``near_band`` of ``z_min`` are split into cells
    ``near_refine`` times smaller in each direction; the carrier near field
    oscillates laterally on the scale of the ultrasound wavelength there.
    The remaining rows use ``dx`` by ``dz`` cells. The upper z bound is
    rounded up to a whole number of coarse rows. Each cell is integrated
    with a ``rule x rule`` Gauss rule (1 is the midpoint rule).
    """

    patches: tuple[GridPatch, ...]

    @classmethod
    def from_spec(cls, spec: QuadratureSpec) -> "QuadratureGrid":
        nz = max(1, math.ceil((spec.z_max - spec.z_min) / spec.dz - 1e-9))
        r = spec.near_refine
        n_near = min(nz, math.ceil(spec.near_band / spec.dz - 1e-9)) if r > 1 and spec.near_band > 0 else 0
        patches = []
        o = spec.rule
        if n_near:
            patches += _patches(spec.x_min, spec.x_max, spec.z_min, n_near * r, spec.dx / r, spec.dz / r, o)
        if nz > n_near:
            patches += _patches(spec.x_min, spec.x_max, spec.z_min + n_near * spec.dz, nz - n_near, spec.dx, spec.dz, o)
        return cls(tuple(patches))

    @property
    def slices(self) -> list[slice]:
        out, start = [], 0
        for p in self.patches:
            out.append(slice(start, start + p.size))
            start += p.size
        return out

    @property
    def points(self) -> np.ndarray:
        return np.vstack([p.points for p in self.patches])

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([np.full(p.size, p.cell_area) for p in self.patches])

    @property
    def x_extent(self) -> tuple[float, float]:
        return (
            min(p.x[0] + p.box_offset[0] - 0.5 * p.box[0] for p in self.patches),
            max(p.x[-1] + p.box_offset[0] + 0.5 * p.box[0] for p in self.patches),
        )


@dataclass(frozen=True)
class UltrasoundFieldTable:
    """Per-element carrier pressures on a point set, for unit drives."""

    points: np.ndarray
    p1: np.ndarray  # (G, N) at f1
    p2: np.ndarray  # (G, N) at f2


@dataclass(frozen=True)
class TransferTensor:
    """Transfer functions to a set of control points.

    ``kind == "pal"``: ``values`` has shape (M, N, N) and
    ``p_a = s1^H H_m s2``. ``kind == "edl"``: shape (M, N) and
    ``p_a = h_m^T s``.
    """

    kind: str
    values: np.ndarray
    control_points: np.ndarray
    f_audio: float

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def n_elements(self) -> int:
        return self.values.shape[1]

    def subset(self, index) -> "TransferTensor":
        return TransferTensor(self.kind, self.values[index], self.control_points[index], self.f_audio)

    def with_values(self, values: np.ndarray) -> "TransferTensor":
        return TransferTensor(self.kind, values, self.control_points, self.f_audio)


@dataclass(frozen=True)
class SourcePair:
    """Drive vectors in units of ``v0``. ``s2`` is ``None`` for an EDL array."""

    s1: np.ndarray
    s2: np.ndarray | None = None

    @property
    def is_pal(self) -> bool:
        return self.s2 is not None

    def normalized(self) -> "SourcePair":
        s1 = self.s1 / np.linalg.norm(self.s1)
        s2 = None if self.s2 is None else self.s2 / np.linalg.norm(self.s2)
        return SourcePair(s1, s2)


# ---------------------------------------------------------------------------
# Linear strip radiation
# ---------------------------------------------------------------------------


def _face_nodes(width: float, wavelength: float, z_near: float):
    """Gauss-Legendre nodes across one element face, relative to its centre.

    Panels are at most half a wavelength long (16 nodes per wavelength) and
    no longer than twice the closest evaluation height, so the kernel stays
    well resolved for points hugging the face.
    """
    panel = min(0.5 * wavelength, max(2.0 * z_near, width / 64.0))
    n_panels = max(1, math.ceil(width / panel - 1e-9))
    t, w = np.polynomial.legendre.leggauss(GAUSS_NODES_PER_PANEL)
    edges = np.linspace(-0.5 * width, 0.5 * width, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _strip_integral(k: complex, dx_from_center: np.ndarray, z: np.ndarray, nodes, weights) -> np.ndarray:
    out = np.empty(dx_from_center.shape, dtype=complex)
    for s in range(0, len(out), _POINT_CHUNK):
        sl = slice(s, s + _POINT_CHUNK)
        r = np.hypot(dx_from_center[sl, None] - nodes[None, :], z[sl, None])
        out[sl] = hankel1_0_unchecked(k * r) @ weights
    return out


def _check_points(points: np.ndarray, geometry: ArrayGeometry) -> None:
    z = points[:, 1]
    if np.any(z < 0):
        raise ValueError("field points must satisfy z >= 0")
    on_line = z == 0
    if np.any(on_line):
        x = points[on_line, 0]
        half = 0.5 * geometry.element_width
        inside = np.abs(x[:, None] - geometry.centers[None, :]) <= half
        if inside.any():
            raise ValueError("field point on the source line inside an element (kernel singularity)")


def element_fields(geometry: ArrayGeometry, medium: MediumParams, frequency: float, points) -> np.ndarray:
    """Pressure of each element driven alone at velocity ``v0``.

    ``points`` is an ``(P, 2)`` array, a :class:`GridPatch` or a
    :class:`QuadratureGrid`. On a patch whose x-spacing divides the element
    pitch, one reference element is evaluated on an extended grid and
    shifted, which is exact. Returns ``(P, N)`` complex.
    """
    k = wavenumber(medium, frequency)
    omega = 2.0 * math.pi * frequency
    pref = 0.5 * medium.rho0 * omega * geometry.v0
    wavelength = medium.c0 / frequency
    centers = geometry.centers

    if isinstance(points, QuadratureGrid):
        return np.vstack([element_fields(geometry, medium, frequency, p) for p in points.patches])
    if isinstance(points, GridPatch):
        steps = (centers - centers[0]) / points.dx
        shift = np.rint(steps).astype(int)
        if np.allclose(steps, shift, rtol=0, atol=1e-9):
            return pref * _grid_fields_shifted(points, k, wavelength, geometry.element_width, centers[0], shift)
        points = points.points

    points = np.asarray(points, dtype=float)
    _check_points(points, geometry)
    z_near = float(points[:, 1].min()) if len(points) else 1.0
    nodes, weights = _face_nodes(geometry.element_width, wavelength, z_near)
    out = np.empty((len(points), geometry.n_elements), dtype=complex)
    for n, c in enumerate(centers):
        out[:, n] = _strip_integral(k, points[:, 0] - c, points[:, 1], nodes, weights)
    return pref * out


def _grid_fields_shifted(grid: GridPatch, k, wavelength, width, c0, shift) -> np.ndarray:
    s_max = int(shift[-1])
    nx, nz = len(grid.x), len(grid.z)
    x_ext = grid.x[0] + (np.arange(nx + s_max) - s_max) * grid.dx
    zz, xx = np.meshgrid(grid.z, x_ext, indexing="ij")
    if np.any(zz <= 0):
        raise ValueError("quadrature grid must lie strictly above the source plane")
    nodes, weights = _face_nodes(width, wavelength, float(grid.z.min()))
    ref = _strip_integral(k, xx.ravel() - c0, zz.ravel(), nodes, weights).reshape(nz, nx + s_max)
    out = np.empty((nz, nx, len(shift)), dtype=complex)
    for n, s in enumerate(shift):
        j0 = s_max - int(s)
        out[:, :, n] = ref[:, j0 : j0 + nx]
    return out.reshape(nz * nx, len(shift))


def ultrasound_field(geometry: ArrayGeometry, medium: MediumParams, plan: FrequencyPlan, grid) -> UltrasoundFieldTable:
    """Per-element carrier fields at ``f1`` and ``f2`` on ``grid``."""
    pts = grid.points if isinstance(grid, (QuadratureGrid, GridPatch)) else np.asarray(grid, dtype=float)
    p1 = element_fields(geometry, medium, plan.f1, grid)
    p2 = element_fields(geometry, medium, plan.f2, grid)
    return UltrasoundFieldTable(pts, p1, p2)


def _source_coefficient(medium: MediumParams, plan: FrequencyPlan) -> complex:
    return medium.beta * plan.omega_audio / (1j * medium.rho0**2 * medium.c0**4)


def virtual_source_density(table: UltrasoundFieldTable, medium: MediumParams, plan: FrequencyPlan, drives: SourcePair) -> np.ndarray:
    """Audio virtual-source density on the table's points for ``drives``."""
    n = table.p1.shape[1]
    if table.p1.shape != table.p2.shape or len(table.points) != table.p1.shape[0]:
        raise ValueError("field table arrays disagree in size")
    if drives.s2 is None or len(drives.s1) != n or len(drives.s2) != n:
        raise ValueError(f"drives must be two length-{n} vectors")
    p1 = table.p1 @ drives.s1
    p2 = table.p2 @ drives.s2
    return _source_coefficient(medium, plan) * np.conj(p1) * p2


# ---------------------------------------------------------------------------
# Audio kernel on cells
# ---------------------------------------------------------------------------


def _h0_cell_average_singular(k: complex, dx: float, dz: float) -> complex:
    """Mean of H0(k r) over a cell centred on the singularity.

    Uses the small-argument form of H0 averaged over the equal-area disk.
    """
    rho = math.sqrt(dx * dz / math.pi)
    return 1.0 + 1j * (2.0 / math.pi) * (np.log(0.5 * k * rho) + EULER_GAMMA - 0.5)


def cell_kernel(
    k: complex,
    ddx: np.ndarray,
    ddz: np.ndarray,
    dx: float,
    dz: float,
    refine: int,
    box_offset: tuple[float, float] = (0.0, 0.0),
    near_radius: float | None = None,
) -> np.ndarray:
    """Weighted audio kernel ``H0(k |d|) dx dz`` for quadrature nodes.

    ``ddx``, ``ddz`` are offsets from the field point to the nodes; each
    node owns a ``dx`` by ``dz`` box centred ``box_offset`` away from it.
    Boxes whose centre lies within ``near_radius`` (default: the box
    diagonal) of the field point are instead integrated on a
    ``refine x refine`` sub-grid.
    """
    ddx = np.asarray(ddx, dtype=float)
    ddz = np.asarray(ddz, dtype=float)
    bx, bz = ddx + box_offset[0], ddz + box_offset[1]
    diag = math.hypot(dx, dz)
    radius = diag if near_radius is None else near_radius
    near = np.hypot(bx, bz) <= radius * (1 + 1e-12)
    out = np.empty(ddx.shape, dtype=complex)
    far = ~near
    out[far] = hankel1_0_unchecked(k * np.hypot(ddx[far], ddz[far]))
    if near.any():
        sub = (np.arange(refine) + 0.5) / refine - 0.5
        sx, sz = np.meshgrid(sub * dx, sub * dz, indexing="ij")
        rs = np.hypot(bx[near][:, None] + sx.ravel()[None, :], bz[near][:, None] + sz.ravel()[None, :])
        tiny = rs < 1e-9 * diag
        vals = np.empty(rs.shape, dtype=complex)
        vals[~tiny] = hankel1_0_unchecked(k * rs[~tiny])
        vals[tiny] = _h0_cell_average_singular(k, dx / refine, dz / refine)
        out[near] = vals.mean(axis=1)
    return out * (dx * dz)


# ---------------------------------------------------------------------------
# Transfer tensors
# ---------------------------------------------------------------------------


def _check_domain(geometry: ArrayGeometry, grid: QuadratureGrid) -> None:
    lo, hi = geometry.aperture
    x0, x1 = grid.x_extent
    if x0 > lo + 1e-12 or x1 < hi - 1e-12:
        raise ValueError("quadrature domain must enclose the array aperture")


def pal_tensor_from_table(
    table: UltrasoundFieldTable,
    grid: QuadratureGrid,
    medium: MediumParams,
    plan: FrequencyPlan,
    control_points: np.ndarray,
    refine: int = 4,
    workers: int = 1,
) -> np.ndarray:
    """Factorised assembly ``H_m = P1^H diag(w * h_m) P2``.

    Control points are processed in fixed blocks and grid chunks are
    summed in a fixed order, so the result does not depend on ``workers``.
    """
    cp = np.asarray(control_points, dtype=float)
    m_pts, n = len(cp), table.p1.shape[1]
    if len(table.points) != sum(p.size for p in grid.patches):
        raise ValueError("field table does not match the quadrature grid")
    k_a = wavenumber(medium, plan.f_audio)
    coef = 0.25 * medium.rho0 * plan.omega_audio * _source_coefficient(medium, plan)
    p1c = np.conj(table.p1)
    p2 = table.p2
    gx, gz = table.points[:, 0], table.points[:, 1]
    blocks = [slice(s, min(s + _BLOCK, m_pts)) for s in range(0, m_pts, _BLOCK)]
    out = np.zeros((m_pts, n * n), dtype=complex)

    def run_block(b: slice, gs: slice, q: np.ndarray, patch: GridPatch) -> None:
        kern = patch.kernel(k_a, cp[b, 0, None] - gx[None, gs], cp[b, 1, None] - gz[None, gs], refine)
        out[b] += kern @ q

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for patch, ps in zip(grid.patches, grid.slices):
            for s in range(ps.start, ps.stop, _GRID_CHUNK):
                gs = slice(s, min(s + _GRID_CHUNK, ps.stop))
                q = (p1c[gs, :, None] * p2[gs, None, :]).reshape(-1, n * n)
                if pool is None:
                    for b in blocks:
                        run_block(b, gs, q, patch)
                else:
                    list(pool.map(lambda b: run_block(b, gs, q, patch), blocks))
    finally:
        if pool is not None:
            pool.shutdown()
    values = coef * out.reshape(m_pts, n, n)
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite entries in PAL transfer tensor")
    return values


def assemble_pal_tensor(
    geometry: ArrayGeometry,
    medium: MediumParams,
    plan: FrequencyPlan,
    quad: QuadratureSpec,
    control_points: np.ndarray,
    workers: int = 1,
) -> TransferTensor:
    """PAL transfer tensor (M, N, N) for the given control points."""
    grid = QuadratureGrid.from_spec(quad)
    _check_domain(geometry, grid)
    table = ultrasound_field(geometry, medium, plan, grid)
    values = pal_tensor_from_table(table, grid, medium, plan, control_points, quad.refine, workers)
    return TransferTensor("pal", values, np.asarray(control_points, dtype=float), plan.f_audio)


def assemble_edl_vector(
    geometry: ArrayGeometry, medium: MediumParams, plan: FrequencyPlan, control_points: np.ndarray
) -> TransferTensor:
    """EDL transfer vectors (M, N): strips radiating directly at ``f_audio``."""
    cp = np.asarray(control_points, dtype=float)
    values = element_fields(geometry, medium, plan.f_audio, cp)
    return TransferTensor("edl", values, cp, plan.f_audio)


def audio_pressure(tensor: TransferTensor, drives: SourcePair, m=None):
    """Audio pressure at control point ``m`` (or all points when ``None``)."""
    n = tensor.n_elements
    vals = tensor.values if m is None else tensor.values[_check_index(tensor, m)]
    s1 = np.asarray(drives.s1)
    if len(s1) != n:
        raise ValueError(f"drive length {len(s1)} does not match {n} elements")
    if tensor.kind == "pal":
        if drives.s2 is None or len(drives.s2) != n:
            raise ValueError("PAL tensor needs two length-N drives")
        return np.conj(s1) @ vals @ drives.s2 if m is not None else np.einsum("i,mij,j->m", np.conj(s1), vals, drives.s2)
    return vals @ s1


def _check_index(tensor: TransferTensor, m) -> int:
    m = int(m)
    if not 0 <= m < tensor.n_points:
        raise IndexError(f"control point index {m} out of range [0, {tensor.n_points})")
    return m


# ---------------------------------------------------------------------------
# Field maps
# ---------------------------------------------------------------------------


def spl_db(p) -> np.ndarray:
    """SPL (dB re 20 uPa) of peak amplitudes; zero pressure maps to the floor."""
    amp = np.abs(np.asarray(p)) / math.sqrt(2.0)
    with np.errstate(divide="ignore"):
        level = 20.0 * np.log10(amp / P_REF_PA)
    return np.maximum(level, SPL_FLOOR_DB)


def _grid_points(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    zz, xx = np.meshgrid(z, x, indexing="ij")
    return np.column_stack([xx.ravel(), zz.ravel()])


def pal_audio_field(
    geometry: ArrayGeometry,
    medium: MediumParams,
    plan: FrequencyPlan,
    quad: QuadratureSpec,
    drives: SourcePair,
    x: np.ndarray,
    z: np.ndarray,
    table: UltrasoundFieldTable | None = None,
) -> np.ndarray:
    """PAL audio pressure on the rectilinear grid ``x`` by ``z``; shape (nz, nx).

    Each quadrature patch whose spacing divides the render spacing is
    convolved by FFT on its own lattice and subsampled; other patches are
    summed directly.
    """
    grid = QuadratureGrid.from_spec(quad)
    if table is None:
        table = ultrasound_field(geometry, medium, plan, grid)
    q = virtual_source_density(table, medium, plan, drives)
    k_a = wavenumber(medium, plan.f_audio)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    out = np.zeros((len(z), len(x)), dtype=complex)
    for patch, ps in zip(grid.patches, grid.slices):
        qp = q[ps].reshape(patch.shape)
        sx, sz = _stride(x, patch.dx), _stride(z, patch.dz)
        if sx and sz:
            out += _patch_fft(k_a, patch, qp, x, z, sx, sz, quad.refine)
        else:
            out += _patch_direct(k_a, patch, qp, x, z, quad.refine)
    return 0.25 * medium.rho0 * plan.omega_audio * out


def _stride(v: np.ndarray, step: float) -> int:
    """Integer ratio of the spacing of ``v`` to ``step``, or 0."""
    if len(v) < 2:
        return 1
    d = np.diff(v)
    ratio = d[0] / step
    r = int(round(ratio))
    if r < 1 or abs(ratio - r) > 1e-6 or not np.allclose(d, d[0], rtol=0, atol=1e-9 * d[0]):
        return 0
    return r


def _patch_fft(k_a, patch: GridPatch, q, x, z, sx: int, sz: int, refine: int) -> np.ndarray:
    from scipy.signal import fftconvolve

    nzq, nxq = patch.shape
    nx_f = (len(x) - 1) * sx + 1
    nz_f = (len(z) - 1) * sz + 1
    # offsets (field - source) on the patch lattice for index difference j - j'
    lx = x[0] - patch.x[0] + np.arange(-(nxq - 1), nx_f) * patch.dx
    lz = z[0] - patch.z[0] + np.arange(-(nzq - 1), nz_f) * patch.dz
    LZ, LX = np.meshgrid(lz, lx, indexing="ij")
    kern = patch.kernel(k_a, LX, LZ, refine)
    full = fftconvolve(kern, q, mode="full")
    return full[nzq - 1 : nzq - 1 + nz_f : sz, nxq - 1 : nxq - 1 + nx_f : sx]


def _patch_direct(k_a, patch: GridPatch, q, x, z, refine: int) -> np.ndarray:
    pts = _grid_points(x, z)
    src = patch.points
    qf = q.ravel()
    out = np.empty(len(pts), dtype=complex)
    for s in range(0, len(pts), 64):
        sl = slice(s, s + 64)
        kern = patch.kernel(k_a, pts[sl, 0, None] - src[None, :, 0], pts[sl, 1, None] - src[None, :, 1], refine)
        out[sl] = kern @ qf
    return out.reshape(len(z), len(x))


def edl_audio_field(
    geometry: ArrayGeometry, medium: MediumParams, plan: FrequencyPlan, drives: SourcePair, x: np.ndarray, z: np.ndarray
) -> np.ndarray:
    """EDL audio pressure on the grid ``x`` by ``z``; shape (nz, nx)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    pts: object
    if len(x) > 1 and np.allclose(np.diff(x), x[1] - x[0]):
        pts = GridPatch(x, z, float(x[1] - x[0]), float(z[1] - z[0]) if len(z) > 1 else 1.0)
    else:
        pts = _grid_points(x, z)
    h = element_fields(geometry, medium, plan.f_audio, pts)
    return (h @ drives.s1).reshape(len(z), len(x))


def render_field(pressure: np.ndarray) -> np.ndarray:
    """SPL map (dB re 20 uPa) of a complex pressure map."""
    return spl_db(pressure)
