import numpy as np
import pytest

from qusix.kinoform import (
    KINOFORM_GRID,
    Kinoform,
    OrderOverlapError,
    TargetMode,
    first_order,
    fringe_contrast,
    gaussian_beam,
    generate,
    generation_report,
    inverse_sinc,
    make_kinoform,
    simulate_first_order,
)
from qusix.mub import oam_qutrit_mubs
from qusix.optics import GridSpec, OamSuperposition, field_overlap, synthesize_mode
from qusix.states import QUTRIT_CHARGES

from conftest import block_mask, qutrit_states

SMALL = GridSpec(128, 4.0)


def bisect_sinc(y):
    lo, hi = -np.pi, 0.0
    for _ in range(200):
        m = (lo + hi) / 2
        val = np.sin(m) / m if m else 1.0
        lo, hi = (m, hi) if val < y else (lo, m)
    return (lo + hi) / 2


def test_inverse_sinc_examples():
    assert inverse_sinc(1.0) == 0.0
    assert inverse_sinc(0.0) == -np.pi
    # frozen from a 200-step bisection on [-pi, 0]
    assert inverse_sinc(0.5) == pytest.approx(-1.895494267033981, abs=1e-10)
    assert inverse_sinc(0.5) == pytest.approx(bisect_sinc(0.5), abs=1e-10)


def test_inverse_sinc_sweep_and_monotone():
    y = np.random.default_rng(0).uniform(0, 1, 10_000)
    x = inverse_sinc(y)
    assert np.all((x >= -np.pi) & (x <= 0))
    assert np.abs(np.sinc(x / np.pi) - y).max() < 1e-7
    ys = np.linspace(0, 1, 2001)
    assert np.all(np.diff(inverse_sinc(ys)) > 0)
    for v in (1e-9, 0.3, 1 - 1e-12):
        assert inverse_sinc(v) == pytest.approx(bisect_sinc(v), abs=1e-7)


@pytest.mark.parametrize("bad", [-0.1, 1.1, np.nan])
def test_inverse_sinc_domain(bad):
    with pytest.raises(ValueError):
        inverse_sinc(bad)


def test_kinoform_unit_amplitude_is_blazed_grating():
    n = SMALL.n
    Phi = np.random.default_rng(1).uniform(-np.pi, np.pi, (n, n))
    k = make_kinoform(TargetMode(np.ones((n, n)), Phi), 16, SMALL)
    x = np.arange(n) - n // 2
    want = np.mod(Phi - np.pi + 2 * np.pi * x[None, :] / 16, 2 * np.pi)
    assert np.allclose(k.phase, want, atol=1e-12)
    assert k.phase.min() >= 0 and k.phase.max() < 2 * np.pi


def test_kinoform_zero_amplitude_is_flat():
    n = SMALL.n
    k = make_kinoform(TargetMode(np.zeros((n, n)), np.zeros((n, n))), 16, SMALL)
    assert np.all(k.phase == 0)
    g, power = first_order(k)
    assert power < 1e-20


def test_kinoform_translation_symmetry():
    n = SMALL.n
    A = np.full((n, n), 0.4)
    Phi = np.full((n, n), 0.7)
    k = make_kinoform(TargetMode(A, Phi), 8, SMALL)
    # x-independent target: shifting by one period leaves the mask unchanged
    assert np.allclose(k.phase[:, 8:], k.phase[:, :-8], atol=1e-12)


def test_fringe_contrast_range():
    A = np.linspace(0, 1, 11)
    I = fringe_contrast(A)
    assert I[0] == 0 and I[-1] == 1
    assert np.all(np.diff(I) > 0)


def test_target_normalisation():
    t = TargetMode(np.array([[0.0, 2.0], [1.0, 4.0]]), np.zeros((2, 2)))
    assert t.A.max() == 1 and t.A[0, 1] == 0.5


def test_azimuthal_target_ignores_radius():
    sup = OamSuperposition.from_vector(QUTRIT_CHARGES, oam_qutrit_mubs()["O2"].state(1))
    t = TargetMode.azimuthal(sup, SMALL)
    r, phi = SMALL.polar()
    sel = (np.abs(phi - 0.5) < 0.05) & (r > 0.3)
    assert np.ptp(t.A[sel]) < 0.1
    assert make_kinoform(t, 16, SMALL).phase.shape == (128, 128)


def test_order_overlap_errors():
    with pytest.raises(OrderOverlapError):
        Kinoform(SMALL, np.zeros((128, 128)), 3.0)
    k = Kinoform(GridSpec(64, 4.0), np.zeros((64, 64)), 16.0)
    with pytest.raises(OrderOverlapError):
        first_order(k)


def test_gaussian_state_end_to_end():
    sup = OamSuperposition.eigenstate(0)
    ideal = synthesize_mode(sup, KINOFORM_GRID)
    g = generate(sup)
    assert field_overlap(ideal, g) >= 0.99
    assert g.norm() == pytest.approx(1)


def test_gaussian_input_beam_keeps_oam_content():
    sup = OamSuperposition.from_vector(QUTRIT_CHARGES, oam_qutrit_mubs()["O3"].state(0))
    spec = KINOFORM_GRID
    k = make_kinoform(TargetMode.from_superposition(sup, spec), 16, spec)
    g = simulate_first_order(k, gaussian_beam(spec, waist=3.0))
    # only the radial profile changes: the azimuthal content still matches
    ideal = synthesize_mode(sup, spec)
    assert field_overlap(ideal, g) > 0.9


def test_windowing_never_amplifies():
    spec = KINOFORM_GRID
    for sup in qutrit_states()[3:5]:
        k = make_kinoform(TargetMode.from_superposition(sup, spec), 16, spec)
        _, power = first_order(k)
        assert 0 < power <= 1


def test_alpha1_to_alpha2_crosstalk(qutrit_report):
    # rows: generated alpha1 (index 3), column alpha2 (index 4)
    assert qutrit_report.overlaps[3, 4] <= 1e-3


def test_qutrit_generation_report(qutrit_report):
    ov = qutrit_report.overlaps
    same = block_mask(3, 3)
    assert qutrit_report.fidelities.min() >= 0.99
    assert ov[same & ~np.eye(9, dtype=bool)].max() <= 1e-3
    assert np.abs(ov[~same] - 1 / 3).max() <= 0.01


def test_report_edge_cases():
    assert generation_report([]).overlaps.shape == (0, 0)
    r = generation_report([OamSuperposition.eigenstate(1)])
    assert r.overlaps.shape == (1, 1) and r.fidelities[0] >= 0.99


@pytest.mark.slow
def test_fidelity_grid_convergence():
    sups = qutrit_states()
    coarse = generation_report(sups, 16, KINOFORM_GRID).fidelities
    fine = generation_report(sups, 32, GridSpec(1024, KINOFORM_GRID.window)).fidelities
    assert np.abs(coarse - fine).max() < 1e-3
