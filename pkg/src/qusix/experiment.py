"""Simulated 18x18 generation/detection experiments on the qusix MUBs.

Rows index the generated state and columns the detected one; blocks of six
follow bases I, II, III.  Detection is a projection onto the detection
state, so with kinoform-simulated fields every entry is a field overlap.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .kinoform import DEFAULT_PERIOD, KINOFORM_GRID, generate
from .optics import GridSpec, OamSuperposition, grid_inner_product
from .states import PURE_OAM_CHARGES, QUTRIT_CHARGES, QusixEncoding

MODELS = ("ideal", "simulated-optics")
BLOCK = 6
DEFAULT_RATE = 7000.0
DEFAULT_EXPOSURE = 1.0


@dataclass(frozen=True)
class CountsMatrix:
    counts: np.ndarray
    exposure: float
    rate: float

    def __post_init__(self):
        if self.exposure <= 0:
            raise ValueError("exposure must be positive")
        if not np.all(np.isfinite(self.counts)):
            raise ValueError("counts must be finite")


def _field_gram(sups: Sequence[OamSuperposition], period: float, spec: GridSpec) -> np.ndarray:
    fields = [generate(s, period, spec) for s in sups]
    n = len(fields)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = grid_inner_product(fields[i], fields[j])
            G[j, i] = np.conj(G[i, j])
    return G


def probability_matrix(enc: QusixEncoding, model: str = "ideal", period: float = DEFAULT_PERIOD,
                       spec: GridSpec = KINOFORM_GRID) -> np.ndarray:
    """``P[i, j] = |<psi_j|psi_i>|^2`` for all 18 x 18 state pairs."""
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    if model == "ideal":
        V = enc.vectors
        return np.abs(V.conj().T @ V) ** 2
    if enc.kind == "pure-oam":
        sups = [OamSuperposition.from_vector(PURE_OAM_CHARGES, s.vector) for s in enc.states]
        G = _field_gram(sups, period, spec)
        return np.abs(G.T) ** 2
    # hybrid: only the nine distinct OAM qutrit states need simulating
    oams = []
    index = []
    for s in enc.states:
        for k, o in enumerate(oams):
            if np.allclose(o, s.oam, atol=1e-14):
                index.append(k)
                break
        else:
            index.append(len(oams))
            oams.append(s.oam)
    G = _field_gram([OamSuperposition.from_vector(QUTRIT_CHARGES, o) for o in oams], period, spec)
    pol = np.array([s.pol for s in enc.states]).T
    Gpol = pol.conj().T @ pol
    idx = np.array(index)
    Goam = G[np.ix_(idx, idx)]
    return np.abs((Gpol * Goam).T) ** 2


def poissonize(P: np.ndarray, rate: float = DEFAULT_RATE, exposure: float = DEFAULT_EXPOSURE,
               seed: int = 0) -> CountsMatrix:
    """Poisson counts with mean ``rate * exposure * P[i, j]``.

    Each cell draws from its own stream keyed by ``(seed, i, j)``.
    """
    P = np.asarray(P, dtype=float)
    if np.any(P < 0) or np.any(P > 1 + 1e-12):
        raise ValueError("probabilities must lie in [0, 1]")
    mean = rate * exposure * np.clip(P, 0, 1)
    counts = np.zeros(P.shape, dtype=np.int64)
    for (i, j), lam in np.ndenumerate(mean):
        rng = np.random.default_rng([seed, i, j])
        counts[i, j] = rng.poisson(lam)
    return CountsMatrix(counts, exposure, rate)


def normalize_counts(c: CountsMatrix | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row, per-detection-basis frequencies.

    Returns the estimate and a boolean ``(rows, blocks)`` array marking
    blocks whose total was zero; those entries are NaN.
    """
    counts = np.asarray(c.counts if isinstance(c, CountsMatrix) else c, dtype=float)
    rows, cols = counts.shape
    if cols % BLOCK:
        raise ValueError(f"column count {cols} is not a multiple of {BLOCK}")
    blocks = counts.reshape(rows, cols // BLOCK, BLOCK)
    totals = blocks.sum(axis=2, keepdims=True)
    empty = totals[..., 0] == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        est = np.where(totals > 0, blocks / np.where(totals > 0, totals, 1), np.nan)
    return est.reshape(rows, cols), empty


def similarity(P: np.ndarray, Q: np.ndarray) -> float:
    """``(sum sqrt(P Q))^2 / (sum P * sum Q)``."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise ValueError(f"shape mismatch {P.shape} vs {Q.shape}")
    if np.any(P < 0) or np.any(Q < 0):
        raise ValueError("similarity needs nonnegative matrices")
    sp, sq = P.sum(), Q.sum()
    if sp == 0 or sq == 0:
        raise ValueError("similarity is undefined for an all-zero matrix")
    return float(np.sum(np.sqrt(P * Q)) ** 2 / (sp * sq))


def block_deviations(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Max absolute difference inside each 6 x 6 block."""
    D = np.abs(np.asarray(P) - np.asarray(Q))
    nb = D.shape[0] // BLOCK
    return D.reshape(nb, BLOCK, nb, BLOCK).max(axis=(1, 3))


def matrix_csv(M: np.ndarray, labels: Sequence[str], fmt: str = "{:.10g}") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", *labels])
    for lab, row in zip(labels, M):
        w.writerow([lab, *(fmt.format(v) for v in row)])
    return buf.getvalue()


@dataclass(frozen=True)
class ExperimentRun:
    encoding: str
    model: str
    ideal: np.ndarray
    model_matrix: np.ndarray
    counts: CountsMatrix
    estimate: np.ndarray
    empty_blocks: np.ndarray
    S: float

    def summary(self) -> dict:
        return {
            "encoding": self.encoding,
            "model": self.model,
            "rate": self.counts.rate,
            "exposure": self.counts.exposure,
            "S": self.S,
            "S_model_vs_ideal": similarity(self.model_matrix, self.ideal),
            "block_deviations": block_deviations(np.nan_to_num(self.estimate), self.ideal).tolist(),
            "empty_blocks": int(self.empty_blocks.sum()),
        }


def run_experiment(enc: QusixEncoding, model: str = "simulated-optics", rate: float = DEFAULT_RATE,
                   exposure: float = DEFAULT_EXPOSURE, seed: int = 0, period: float = DEFAULT_PERIOD,
                   spec: GridSpec = KINOFORM_GRID) -> ExperimentRun:
    """Ideal matrix, model matrix, Poisson counts, estimate and ``S`` vs ideal."""
    ideal = probability_matrix(enc, "ideal")
    Pm = ideal if model == "ideal" else probability_matrix(enc, model, period, spec)
    counts = poissonize(np.clip(Pm, 0, 1), rate, exposure, seed)
    est, empty = normalize_counts(counts)
    S = similarity(np.nan_to_num(est), ideal)
    return ExperimentRun(enc.kind, model, ideal, Pm, counts, est, empty, S)
