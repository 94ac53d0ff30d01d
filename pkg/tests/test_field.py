import math

import numpy as np
import pytest
from scipy.special import hankel1

from palzone.field import (
    GridPatch,
    QuadratureGrid,
    SourcePair,
    TransferTensor,
    UltrasoundFieldTable,
    assemble_edl_vector,
    assemble_pal_tensor,
    audio_pressure,
    edl_audio_field,
    element_fields,
    pal_audio_field,
    pal_tensor_from_table,
    render_field,
    spl_db,
    ultrasound_field,
    virtual_source_density,
)
from palzone.model import ArrayGeometry, FrequencyPlan, MediumParams, QuadratureSpec, wavenumber

from conftest import random_unit


def strip_oracle(k, width, x, z, tol=1e-8):
    """Strip integral of H0 by composite Gauss-Legendre, halving until converged."""
    t, w = np.polynomial.legendre.leggauss(10)
    n, prev = 4, None
    while True:
        edges = np.linspace(-width / 2, width / 2, n + 1)
        h = np.diff(edges) / 2
        nodes = ((edges[:-1] + edges[1:]) / 2)[:, None] + h[:, None] * t
        val = np.sum(h[:, None] * w * hankel1(0, k * np.hypot(x - nodes, z)))
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val
        prev, n = val, 2 * n


def test_single_element_matches_adaptive_oracle(lossless):
    g = ArrayGeometry.uniform(1, 0.01)
    f = 40e3
    p = element_fields(g, lossless, f, np.array([[0.0, 0.5], [0.02, 0.01], [-0.3, 0.2]]))[:, 0]
    k = 2 * math.pi * f / lossless.c0
    pref = 0.5 * lossless.rho0 * 2 * math.pi * f
    for (x, z), val in zip([(0.0, 0.5), (0.02, 0.01), (-0.3, 0.2)], p):
        ref = pref * strip_oracle(k, 0.01, x, z)
        assert abs(val - ref) <= 1e-8 * abs(ref)


def test_cylindrical_spreading(lossless):
    g = ArrayGeometry.uniform(1, 0.01)
    p = element_fields(g, lossless, 40e3, np.array([[0.0, 1.0], [0.0, 4.0]]))[:, 0]
    assert abs(p[0]) / abs(p[1]) == pytest.approx(2.0, rel=0.05)


def test_zero_velocity_gives_zero_field(medium):
    g = ArrayGeometry.uniform(3, 0.01, v0=0.0)
    p = element_fields(g, medium, 40e3, np.array([[0.0, 0.3], [0.1, 0.2]]))
    assert np.all(p == 0)


def test_absorption_strictly_reduces_magnitude():
    g = ArrayGeometry.uniform(1, 0.01)
    pts = np.array([[0.0, 0.05], [0.1, 0.4], [-0.2, 1.0]])
    mags = [np.abs(element_fields(g, MediumParams(alpha_override=a), 40e3, pts)[:, 0]) for a in (0.0, 0.1, 0.5, 1.0)]
    for lo, hi in zip(mags[1:], mags[:-1]):
        assert np.all(lo < hi)


def test_point_on_source_line_inside_element_rejected(medium):
    g = ArrayGeometry.uniform(2, 0.01)
    with pytest.raises(ValueError):
        element_fields(g, medium, 40e3, np.array([[0.004, 0.0]]))
    # on the baffle but outside every element is fine
    assert np.isfinite(element_fields(g, medium, 40e3, np.array([[0.05, 0.0]]))).all()


def test_shifted_grid_path_matches_direct_evaluation(medium, small_quad):
    g = ArrayGeometry.uniform(4, 0.01)
    grid = QuadratureGrid.from_spec(small_quad)
    fast = element_fields(g, medium, 41e3, grid)
    slow = element_fields(g, medium, 41e3, grid.points)
    # H0 series rounding near the branch switch is ~1e-10 relative
    assert np.allclose(fast, slow, rtol=1e-9, atol=0)


def test_quadrature_grid_layout():
    q = QuadratureSpec(-0.1, 0.1, 0.001, 0.1, 0.01, 0.01, near_band=0.02, near_refine=2, rule=2)
    grid = QuadratureGrid.from_spec(q)
    w = grid.weights
    # weights tile the (rounded-up) domain exactly
    assert w.sum() == pytest.approx(0.2 * 0.1)
    assert len(grid.points) == len(w) == sum(p.size for p in grid.patches)
    assert grid.x_extent == pytest.approx((-0.1, 0.1))
    assert grid.points[:, 1].min() > 0.001


def test_midpoint_rule_layout():
    q = QuadratureSpec(-0.1, 0.1, 0.001, 0.1, 0.01, 0.01, near_band=0.0, rule=1)
    grid = QuadratureGrid.from_spec(q)
    (patch,) = grid.patches
    assert patch.shape == (10, 20)
    assert patch.x[0] == pytest.approx(-0.095)


# ---------------------------------------------------------------------------
# virtual sources


@pytest.fixture
def table3(medium, small_quad, plan_2k):
    g = ArrayGeometry.uniform(3, 0.01)
    return ultrasound_field(g, medium, plan_2k, QuadratureGrid.from_spec(small_quad))


def test_density_vanishes_without_first_carrier(table3, medium, plan_2k):
    q = virtual_source_density(table3, medium, plan_2k, SourcePair(np.zeros(3), np.ones(3)))
    assert np.all(q == 0)


def test_density_is_bilinear(table3, medium, plan_2k, rng):
    s1, s2 = random_unit(rng, 3), random_unit(rng, 3)
    q = virtual_source_density(table3, medium, plan_2k, SourcePair(s1, s2))
    q2 = virtual_source_density(table3, medium, plan_2k, SourcePair(2 * s1, 2 * s2))
    assert np.allclose(q2, 4 * q, rtol=1e-13, atol=0)


def test_density_phase_follows_conjugate(table3, medium, plan_2k, rng):
    s1, s2 = random_unit(rng, 3), random_unit(rng, 3)
    phi = 0.7
    q = virtual_source_density(table3, medium, plan_2k, SourcePair(s1, s2))
    qp = virtual_source_density(table3, medium, plan_2k, SourcePair(np.exp(1j * phi) * s1, s2))
    assert np.allclose(qp, np.exp(-1j * phi) * q, rtol=1e-13, atol=0)


def test_density_rejects_mismatched_sizes(table3, medium, plan_2k):
    with pytest.raises(ValueError):
        virtual_source_density(table3, medium, plan_2k, SourcePair(np.ones(2), np.ones(2)))
    bad = UltrasoundFieldTable(table3.points[:-1], table3.p1, table3.p2)
    with pytest.raises(ValueError):
        virtual_source_density(bad, medium, plan_2k, SourcePair(np.ones(3), np.ones(3)))


# ---------------------------------------------------------------------------
# PAL tensor


def naive_pal_tensor(table, grid, medium, plan, cp, refine):
    """Triple loop over (m, i, j), each a plain sum over quadrature nodes."""
    k_a = wavenumber(medium, plan.f_audio)
    coef = medium.beta * plan.omega_audio**2 / (4j * medium.rho0 * medium.c0**4)
    n = table.p1.shape[1]
    out = np.zeros((len(cp), n, n), dtype=complex)
    kern = np.empty((len(cp), len(table.points)), dtype=complex)
    for patch, sl in zip(grid.patches, grid.slices):
        pts = table.points[sl]
        for m, (x, z) in enumerate(cp):
            kern[m, sl] = patch.kernel(k_a, x - pts[:, 0], z - pts[:, 1], refine)
    for m in range(len(cp)):
        for i in range(n):
            for j in range(n):
                acc = 0j
                for g in range(len(table.points)):
                    acc += np.conj(table.p1[g, i]) * table.p2[g, j] * kern[m, g]
                out[m, i, j] = coef * acc
    return out


def test_factorised_assembly_matches_naive_loop(medium, plan_2k):
    g = ArrayGeometry.uniform(2, 0.01)
    quad = QuadratureSpec(-0.05, 0.05, 0.001, 0.08, 0.01, 0.01, near_band=0.01, near_refine=2)
    grid = QuadratureGrid.from_spec(quad)
    table = ultrasound_field(g, medium, plan_2k, grid)
    cp = np.array([[0.0, 0.05], [0.02, 0.03], [-0.03, 0.06], [0.01, 0.2]])
    fast = pal_tensor_from_table(table, grid, medium, plan_2k, cp, quad.refine)
    slow = naive_pal_tensor(table, grid, medium, plan_2k, cp, quad.refine)
    assert np.max(np.abs(fast - slow) / np.abs(slow)) < 1e-10


def test_assembly_independent_of_worker_count(medium, small_quad, plan_2k):
    g = ArrayGeometry.uniform(3, 0.01)
    cp = np.column_stack([np.linspace(-0.05, 0.05, 40), np.full(40, 0.12)])
    a = assemble_pal_tensor(g, medium, plan_2k, small_quad, cp, workers=1).values
    b = assemble_pal_tensor(g, medium, plan_2k, small_quad, cp, workers=3).values
    assert np.array_equal(a, b)


def test_diagonal_entry_is_single_element_pressure(medium, small_quad, plan_2k):
    g = ArrayGeometry.uniform(3, 0.01)
    cp = np.array([[0.02, 0.15], [-0.04, 0.1]])
    full = assemble_pal_tensor(g, medium, plan_2k, small_quad, cp).values
    for n, c in enumerate(g.centers):
        single = ArrayGeometry(1, 0.01, (float(c),))
        h = assemble_pal_tensor(single, medium, plan_2k, small_quad, cp).values[:, 0, 0]
        assert np.allclose(full[:, n, n], h, rtol=1e-12, atol=0)
        # and the rendered single-PAL pressure at the same points agrees
        one = SourcePair(np.ones(1), np.ones(1))
        for m, (x, z) in enumerate(cp):
            p = pal_audio_field(single, medium, plan_2k, small_quad, one, np.array([x]), np.array([z]))
            assert p[0, 0] == pytest.approx(h[m], rel=1e-10)


def test_carrier_swap_transposes(medium, small_quad, plan_2k):
    # swapping the carrier tables gives, entry (j, i), the integral of p2_j^* p1_i
    g = ArrayGeometry.uniform(2, 0.01)
    grid = QuadratureGrid.from_spec(small_quad)
    table = ultrasound_field(g, medium, plan_2k, grid)
    cp = np.array([[0.01, 0.1], [-0.03, 0.17]])
    swapped = UltrasoundFieldTable(table.points, table.p2, table.p1)
    hs = pal_tensor_from_table(swapped, grid, medium, plan_2k, cp, small_quad.refine)
    direct = naive_pal_tensor(swapped, grid, medium, plan_2k, cp, small_quad.refine)
    assert np.allclose(hs, direct, rtol=1e-10, atol=0)
    # the swapped tensor is not simply the transpose when the carriers differ
    h = pal_tensor_from_table(table, grid, medium, plan_2k, cp, small_quad.refine)
    assert not np.allclose(hs, np.swapaxes(h, 1, 2), rtol=1e-3)


def test_mirror_symmetry(medium, small_quad, plan_2k):
    g = ArrayGeometry.uniform(4, 0.01)
    cp = np.array([[0.03, 0.12], [-0.05, 0.08], [0.0, 0.15]])
    mirror = cp * [-1, 1]
    h = assemble_pal_tensor(g, medium, plan_2k, small_quad, cp).values
    hm = assemble_pal_tensor(g, medium, plan_2k, small_quad, mirror).values
    assert np.allclose(hm, h[:, ::-1, ::-1], rtol=1e-9, atol=1e-12 * np.abs(h).max())


def test_domain_must_enclose_aperture(medium, plan_2k):
    g = ArrayGeometry.uniform(24, 0.01)
    quad = QuadratureSpec(-0.05, 0.05, 0.001, 0.1, 0.01, 0.01)
    with pytest.raises(ValueError):
        assemble_pal_tensor(g, medium, plan_2k, quad, np.array([[0.0, 0.05]]))


# ---------------------------------------------------------------------------
# EDL and audio pressure


def test_edl_vector_is_strip_field_at_audio_frequency(medium, plan_2k):
    g = ArrayGeometry.uniform(1, 0.01)
    cp = np.array([[0.1, 0.5], [0.0, 0.2]])
    h = assemble_edl_vector(g, medium, plan_2k, cp).values
    assert np.array_equal(h, element_fields(g, medium, plan_2k.f_audio, cp))


def test_edl_mirror_magnitudes(medium, plan_2k):
    g = ArrayGeometry.uniform(4, 0.01)
    cp = np.array([[0.2, 0.6], [-0.1, 0.4]])
    h = assemble_edl_vector(g, medium, plan_2k, cp).values
    hm = assemble_edl_vector(g, medium, plan_2k, cp * [-1, 1]).values
    assert np.allclose(np.abs(hm), np.abs(h[:, ::-1]), rtol=1e-12)


@pytest.fixture
def pal3(rng):
    v = rng.standard_normal((5, 3, 3)) + 1j * rng.standard_normal((5, 3, 3))
    return TransferTensor("pal", v, np.zeros((5, 2)), 1e3)


def test_basis_drives_extract_entries(pal3):
    e = np.eye(3)
    for i in range(3):
        for j in range(3):
            assert audio_pressure(pal3, SourcePair(e[i], e[j]), 2) == pal3.values[2, i, j]


def test_sesquilinear_scaling_and_superposition(pal3, rng):
    s1, u, v = (random_unit(rng, 3) for _ in range(3))
    c = 0.3 - 1.7j
    p = audio_pressure(pal3, SourcePair(s1, u))
    assert np.allclose(audio_pressure(pal3, SourcePair(c * s1, u)), np.conj(c) * p, rtol=1e-14)
    both = audio_pressure(pal3, SourcePair(s1, u + v))
    assert np.allclose(both, p + audio_pressure(pal3, SourcePair(s1, v)), rtol=1e-13)
    assert audio_pressure(pal3, SourcePair(s1, u), 1) == pytest.approx(p[1], rel=1e-14)


def test_edl_pressure_is_linear(rng):
    t = TransferTensor("edl", rng.standard_normal((4, 3)) + 0j, np.zeros((4, 2)), 1e3)
    s = random_unit(rng, 3)
    assert np.allclose(audio_pressure(t, SourcePair(2.5j * s)), 2.5j * audio_pressure(t, SourcePair(s)))


def test_audio_pressure_errors(pal3):
    with pytest.raises(IndexError):
        audio_pressure(pal3, SourcePair(np.ones(3), np.ones(3)), 5)
    with pytest.raises(ValueError):
        audio_pressure(pal3, SourcePair(np.ones(2), np.ones(2)), 0)
    with pytest.raises(ValueError):
        audio_pressure(pal3, SourcePair(np.ones(3)), 0)


# ---------------------------------------------------------------------------
# rendering


def test_spl_reference_levels():
    p = np.array([20e-6 * math.sqrt(2), 200e-6 * math.sqrt(2), 0.0])
    assert spl_db(p) == pytest.approx([0.0, 20.0, -120.0], abs=1e-12)
    assert np.array_equal(render_field(p), spl_db(p))


def test_fft_render_matches_direct_sum(medium, small_quad, plan_2k, rng):
    g = ArrayGeometry.uniform(3, 0.01)
    drives = SourcePair(random_unit(rng, 3), random_unit(rng, 3))
    x = -0.1 + (np.arange(20) + 0.5) * 0.01
    z = (np.arange(8) + 0.5) * 0.01 + 0.1
    fast = pal_audio_field(g, medium, plan_2k, small_quad, drives, x, z)
    # an irregular axis forces direct summation at the same points
    slow = np.array([[pal_audio_field(g, medium, plan_2k, small_quad, drives, np.array([a]), np.array([b]))[0, 0] for a in x] for b in z])
    assert np.allclose(fast, slow, rtol=1e-9, atol=1e-12 * np.abs(slow).max())


def test_render_matches_tensor_at_control_points(medium, small_quad, plan_2k, rng):
    g = ArrayGeometry.uniform(3, 0.01)
    drives = SourcePair(random_unit(rng, 3), random_unit(rng, 3))
    x = np.array([-0.02, 0.03])
    z = np.array([0.11, 0.16])
    field = pal_audio_field(g, medium, plan_2k, small_quad, drives, x, z)
    cp = np.array([[a, b] for b in z for a in x])
    t = assemble_pal_tensor(g, medium, plan_2k, small_quad, cp)
    assert np.allclose(field.ravel(), audio_pressure(t, drives), rtol=1e-10)


def test_edl_render_matches_vector(medium, plan_2k, rng):
    g = ArrayGeometry.uniform(4, 0.01)
    s = random_unit(rng, 4)
    x = -0.2 + (np.arange(40) + 0.5) * 0.01
    z = (np.arange(5) + 0.5) * 0.01
    field = edl_audio_field(g, medium, plan_2k, SourcePair(s), x, z)
    pts = np.array([[a, b] for b in z for a in x])
    h = assemble_edl_vector(g, medium, plan_2k, pts)
    assert np.allclose(field.ravel(), audio_pressure(h, SourcePair(s)), rtol=1e-11)
