import numpy as np
import pytest

from qusix.mub import (
    MubSet,
    computational_basis,
    fourier_basis,
    oam_qutrit_mubs,
    qusix_mubs,
    select_bases,
    verify_mub_set,
)
from qusix.search import (
    SearchConfig,
    mub_set_residual,
    residual_gradient,
    search_extension_vector,
    search_full_mub_set,
    search_report,
    unbiasedness_residual,
)


def test_residual_examples():
    c3 = MubSet(3, (computational_basis(3),))
    for v in fourier_basis(3).columns:
        assert unbiasedness_residual(v, c3) < 1e-12
    e0 = np.eye(6)[0]
    assert unbiasedness_residual(e0, MubSet(6, (computational_basis(6),))) == pytest.approx(30 / 36, abs=1e-15)
    o = oam_qutrit_mubs()
    first3 = select_bases(o, ["O1", "O2", "O3"])
    for v in o["O4"].columns:
        assert unbiasedness_residual(v, first3) < 1e-12
    with pytest.raises(ValueError):
        unbiasedness_residual(np.ones(2), first3)


def test_residual_invariances():
    rng = np.random.default_rng(3)
    s = qusix_mubs()
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    v /= np.linalg.norm(v)
    r = unbiasedness_residual(v, s)
    assert unbiasedness_residual(np.exp(1.3j) * v, s) == pytest.approx(r, rel=1e-12)
    perm = MubSet(6, tuple(type(b)(b.matrix[:, rng.permutation(6)], b.label) for b in reversed(s.bases)))
    assert unbiasedness_residual(v, perm) == pytest.approx(r, rel=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    s = qusix_mubs()
    h = 1e-6
    for _ in range(20):
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v /= np.linalg.norm(v)
        g = residual_gradient(v, s)
        fd = np.zeros(6, dtype=complex)
        for k in range(6):
            e = np.zeros(6)
            e[k] = h
            fd[k] = (unbiasedness_residual(v + e, s) - unbiasedness_residual(v - e, s)) / (2 * h)
            fd[k] += 1j * (unbiasedness_residual(v + 1j * e, s) - unbiasedness_residual(v - 1j * e, s)) / (2 * h)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_equatorial_state_found_in_d2():
    for seed in range(3):
        r = search_extension_vector(MubSet(2, (computational_basis(2),)), SearchConfig(restarts=3, seed=seed))
        assert r.residual < 1e-10
        assert np.allclose(np.abs(r.best_vector) ** 2, 0.5, atol=1e-5)


def test_qutrit_extension_recovers_fourth_basis():
    o = oam_qutrit_mubs()
    r = search_extension_vector(select_bases(o, ["O1", "O2", "O3"]), SearchConfig(restarts=50, seed=1))
    assert r.residual < 1e-8
    assert r.converged
    # the vector must coincide (up to phase) with a column of O4
    ov = np.abs(o["O4"].matrix.conj().T @ r.best_vector) ** 2
    assert ov.max() == pytest.approx(1, abs=1e-6)


def test_qusix_extension_floor():
    r = search_extension_vector(qusix_mubs(), SearchConfig(restarts=200, seed=1))
    assert r.residual > 1e-3
    assert r.residual == pytest.approx(unbiasedness_residual(r.best_vector, qusix_mubs()))
    assert np.linalg.norm(r.best_vector) == pytest.approx(1)


def test_search_is_deterministic():
    s = qusix_mubs()
    cfg = SearchConfig(restarts=8, max_iterations=200, seed=42)
    a = search_extension_vector(s, cfg)
    b = search_extension_vector(s, cfg)
    assert np.array_equal(a.best_vector, b.best_vector)
    assert np.array_equal(a.all_residuals, b.all_residuals)
    assert a.restart_index == int(np.argmin(a.all_residuals))


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(restarts=0)
    with pytest.raises(ValueError):
        SearchConfig(tol=0)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_full_set_prime_powers(d):
    r = search_full_mub_set(d, d + 1, SearchConfig(restarts=5, seed=0))
    assert r.residual < 1e-8
    assert verify_mub_set(MubSet(d, tuple(r.bases)), 1e-4)


def test_full_set_d6_four_bases_floor():
    r = search_full_mub_set(6, 4, SearchConfig(restarts=50, seed=0))
    assert r.residual > 1e-3


def test_mub_set_residual_of_known_sets():
    assert mub_set_residual(qusix_mubs()) < 1e-28
    o = oam_qutrit_mubs()
    assert mub_set_residual([o["O1"], o["O1"]]) == pytest.approx(3 * (2 / 3) ** 2 + 6 * (1 / 3) ** 2)
    with pytest.raises(ValueError):
        search_full_mub_set(3, 1)


def test_report_layout():
    s = select_bases(oam_qutrit_mubs(), ["O1", "O2", "O3"])
    r = search_extension_vector(s, SearchConfig(restarts=4, seed=0))
    doc = search_report(s, r)
    assert set(doc) >= {"dim", "bases_in", "restarts", "best_residual", "best_vector"}
    assert doc["bases_in"] == ["O1", "O2", "O3"] and doc["restarts"] == 4
    assert len(doc["best_vector"]) == 3
