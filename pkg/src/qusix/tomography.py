"""Qusix state tomography from the 72 product projectors.

The projectors are ``pi_a (x) O_b`` for the three polarization and four
qutrit MUBs, grouped into 12 measurement settings of six outcomes each.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .mub import oam_qutrit_mubs, polarization_mubs
from .states import OAM_NAMES, POL_NAMES

DIM = 6
SETTING = 6
RANK_TOL = 1e-10


class TomographyError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectorSet:
    vectors: np.ndarray  # (72, 6), one projector state per row
    labels: tuple[str, ...]
    settings: tuple[str, ...]

    def __len__(self):
        return len(self.labels)

    @property
    def n_settings(self) -> int:
        return len(self.settings)

    def measurement_matrix(self) -> np.ndarray:
        """Rows ``conj(phi_i) phi_j`` so that ``row @ vec(rho) = <phi|rho|phi>``."""
        V = self.vectors
        return np.einsum("ki,kj->kij", V.conj(), V).reshape(len(V), -1)

    def rank(self, tol: float = RANK_TOL) -> int:
        s = np.linalg.svd(self.measurement_matrix(), compute_uv=False)
        return int(np.sum(s > tol * s[0]))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None


def build_projector_set() -> ProjectorSet:
    """All 72 products, ordered setting by setting (``pi_a`` major, ``O_b`` minor)."""
    pol = polarization_mubs()
    oam = oam_qutrit_mubs()
    vecs, labels, settings = [], [], []
    for pb in pol.bases:
        for ob in oam.bases:
            settings.append(f"{pb.label}x{ob.label}")
            for i in range(2):
                for j in range(3):
                    vecs.append(np.kron(pb.state(i), ob.state(j)))
                    labels.append(f"{POL_NAMES[pb.label][i]}/{OAM_NAMES[ob.label][j]}")
    ps = ProjectorSet(np.array(vecs), tuple(labels), tuple(settings))
    if ps.rank() != DIM * DIM:
        raise TomographyError("projector set is not informationally complete")
    return ps


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def predict_probabilities(rho: np.ndarray, ps: ProjectorSet) -> np.ndarray:
    V = ps.vectors
    return np.real(np.einsum("ki,ij,kj->k", V.conj(), rho, V))


def setting_frequencies(counts: np.ndarray, n_settings: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalise counts inside each setting; returns frequencies and totals."""
    c = np.asarray(counts, dtype=float).reshape(n_settings, SETTING)
    tot = c.sum(axis=1)
    f = np.where(tot[:, None] > 0, c / np.where(tot > 0, tot, 1)[:, None], 0.0)
    return f.ravel(), tot


def linear_inversion(p: np.ndarray, ps: ProjectorSet) -> np.ndarray:
    """Least-squares Born-rule inversion with ``tr rho = 1`` enforced.

    The output is Hermitian with unit trace but may have negative
    eigenvalues on noisy data.
    """
    A = ps.measurement_matrix()
    if ps.rank() < DIM * DIM:
        raise TomographyError("projector set is rank deficient")
    p = np.asarray(p, dtype=float)
    AhA = A.conj().T @ A
    x = np.linalg.solve(AhA, A.conj().T @ p)
    c = np.eye(DIM).ravel().astype(complex)
    y = np.linalg.solve(AhA, c)
    x = x - y * (np.vdot(c, x) - 1) / np.vdot(c, y)
    rho = x.reshape(DIM, DIM)
    return (rho + rho.conj().T) / 2


def is_physical(rho: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() >= -tol)


def _loglik(freq: np.ndarray, probs: np.ndarray) -> float:
    mask = freq > 0
    # PSD iterates can still give probabilities of -1e-17 by rounding
    return float(np.sum(freq[mask] * np.log(np.maximum(probs[mask], 1e-300))))


@dataclass(frozen=True)
class MleResult:
    rho: np.ndarray
    iterations: int
    loglik: float
    history: list[float] = field(repr=False)
    converged: bool = True


def mle_reconstruction(counts: np.ndarray, ps: ProjectorSet, max_iter: int = 20000,
                       tol: float = 1e-13, rho0: np.ndarray | None = None) -> MleResult:
    """Maximum-likelihood density matrix by the ``R rho R`` iteration.

    A full step is taken when it does not lower the log-likelihood;
    otherwise the diluted update ``(1 + eps R) rho (1 + eps R)`` with
    ``eps = 0.5`` (halved until it does not lower it) is used.  Stops when the
    gain drops below ``tol``.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (len(ps),):
        raise TomographyError(f"expected {len(ps)} counts, got {counts.shape}")
    if np.any(counts < 0):
        raise TomographyError("counts must be nonnegative")
    if counts.sum() == 0:
        raise TomographyError("all counts are zero")
    freq, totals = setting_frequencies(counts, ps.n_settings)
    active = int(np.sum(totals > 0))
    V = ps.vectors
    rho = np.eye(DIM, dtype=complex) / DIM if rho0 is None else np.array(rho0, dtype=complex)

    def R_of(rho):
        probs = predict_probabilities(rho, ps)
        w = np.where(freq > 0, freq / np.where(probs > 0, probs, 1.0), 0.0)
        return np.einsum("k,ki,kj->ij", w, V, V.conj()) / active, probs

    R, probs = R_of(rho)
    L = _loglik(freq, probs)
    history = [L]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new = R @ rho @ R
        new = new / np.trace(new).real
        Rn, pn = R_of(new)
        Ln = _loglik(freq, pn)
        eps = 0.5
        while Ln < L and eps > 1e-8:
            K = np.eye(DIM) + eps * R
            new = K @ rho @ K.conj().T
            new = new / np.trace(new).real
            Rn, pn = R_of(new)
            Ln = _loglik(freq, pn)
            eps /= 2
        if Ln < L:
            converged = True
            break
        gain = Ln - L
        rho, R, L = (new + new.conj().T) / 2, Rn, Ln
        history.append(L)
        if gain < tol:
            converged = True
            break
    return MleResult(rho, it, L, history, converged)


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return float(np.real(np.vdot(psi, rho @ psi)))


def random_density(rng: np.random.Generator, d: int = DIM, rank: int | None = None) -> np.ndarray:
    """Normalised Wishart matrix ``G G^dag / tr`` from complex Gaussians."""
    k = d if rank is None else rank
    G = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def simulate_counts(rho: np.ndarray, ps: ProjectorSet, rate: float = 7000.0, exposure: float = 1.0,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """Poisson counts per projector, ``rate * exposure`` expected per setting."""
    p = predict_probabilities(rho, ps)
    p = np.where(p < 1e-15, 0.0, p)
    mean = rate * exposure * p
    if rng is None:
        return mean
    return rng.poisson(mean).astype(float)


def counts_csv(counts: np.ndarray, ps: ProjectorSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "count"])
    for lab, c in zip(ps.labels, counts):
        w.writerow([lab, int(round(c))])
    return buf.getvalue()


def read_counts_csv(text: str, ps: ProjectorSet) -> np.ndarray:
    """Parse ``label,count`` rows into the projector order of ``ps``."""
    rows = list(csv.reader(io.StringIO(text)))
    if rows and rows[0] and rows[0][0].strip().lower() == "label":
        rows = rows[1:]
    found = {}
    for n, row in enumerate(rows, 1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise TomographyError(f"row {n}: expected 'label,count', got {row!r}")
        lab, val = row[0].strip(), row[1].strip()
        if lab not in ps.labels:
            raise TomographyError(f"row {n}: unknown projector label {lab!r}")
        try:
            c = float(val)
        except ValueError:
            raise TomographyError(f"row {n}: count {val!r} is not a number") from None
        if c < 0:
            raise TomographyError(f"row {n}: negative count for {lab!r}")
        found[lab] = c
    missing = [lab for lab in ps.labels if lab not in found]
    if missing:
        raise TomographyError(f"missing projector rows: {', '.join(missing)}")
    return np.array([found[lab] for lab in ps.labels])


def density_json(rho: np.ndarray, **extra) -> str:
    doc = {"rho_re": np.real(rho).tolist(), "rho_im": np.imag(rho).tolist()}
    doc.update(extra)
    return json.dumps(doc, indent=2)


def density_csv(rho: np.ndarray, labels: Sequence[str] | None = None) -> str:
    """Long-format ``row,col,re,im`` table for bar-chart rendering."""
    labels = list(labels) if labels is not None else [str(i + 1) for i in range(rho.shape[0])]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            w.writerow([a, b, f"{rho[i, j].real:.12g}", f"{rho[i, j].imag:.12g}"])
    return buf.getvalue()
