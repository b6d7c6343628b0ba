"""Mutually unbiased bases in dimensions 2, 3 and 6.

Bases are stored as unitary matrices whose *columns* are the basis states.
Row order of the qutrit matrices follows the OAM charges (-1, 0, +1); the
qusix bases use a polarization-major tensor order, so index ``p * 3 + q``
means polarization ``p`` and OAM ``q``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-12

OMEGA = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis of C^d, one state per column."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"basis matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.matrix[:, j] for j in range(self.dim)]

    def state(self, index: int) -> np.ndarray:
        return self.matrix[:, index]

    def gram_deviation(self) -> float:
        g = self.matrix.conj().T @ self.matrix
        return float(np.abs(g - np.eye(self.dim)).max())


@dataclass(frozen=True)
class MubSet:
    dim: int
    bases: tuple[Basis, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        for b in self.bases:
            if b.dim != self.dim:
                raise ValueError(f"basis {b.label!r} has dim {b.dim}, expected {self.dim}")

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, key: int | str) -> Basis:
        if isinstance(key, str):
            for b in self.bases:
                if b.label == key:
                    return b
            raise KeyError(key)
        return self.bases[key]

    @property
    def labels(self) -> list[str]:
        return [b.label for b in self.bases]

    def stacked(self) -> np.ndarray:
        """All basis states side by side, shape ``(dim, dim * len(bases))``."""
        if not self.bases:
            return np.zeros((self.dim, 0), dtype=complex)
        return np.hstack([b.matrix for b in self.bases])


@dataclass(frozen=True)
class MubReport:
    passed: bool
    max_deviation: float
    location: tuple
    tol: float

    def __bool__(self):
        return self.passed


def canonical_phase(v: np.ndarray, atol: float = 1e-14) -> np.ndarray:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    v = np.asarray(v, dtype=complex)
    nz = np.flatnonzero(np.abs(v) > atol)
    if nz.size == 0:
        return v.copy()
    a = v[nz[0]]
    return v * (abs(a) / a)


def computational_basis(d: int) -> Basis:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return Basis(np.eye(d, dtype=complex), "computational")


def fourier_basis(d: int) -> Basis:
    """Discrete Fourier basis: column j has entries ``w**(i*j) / sqrt(d)``."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    # integer exponent reduced mod d keeps the phases exact to rounding
    ij = np.outer(np.arange(d), np.arange(d)) % d
    return Basis(np.exp(2j * np.pi * ij / d) / np.sqrt(d), "fourier")


def polarization_mubs() -> MubSet:
    """Eigenbases of the three Pauli operators (pi_1, pi_2, pi_3)."""
    s = 1 / np.sqrt(2)
    pi1 = np.eye(2, dtype=complex)
    pi2 = s * np.array([[1, 1], [1, -1]], dtype=complex)
    pi3 = s * np.array([[1, 1], [1j, -1j]], dtype=complex)
    return MubSet(2, (Basis(pi1, "pi1"), Basis(pi2, "pi2"), Basis(pi3, "pi3")))


def oam_qutrit_mubs() -> MubSet:
    """Complete set of four qutrit MUBs O_1..O_4.

    Columns of O_2, O_3, O_4 are the alpha, beta, gamma states in order.
    """
    w, w2 = OMEGA, OMEGA**2
    s = 1 / np.sqrt(3)
    o1 = np.eye(3, dtype=complex)
    o2 = s * np.array([[1, 1, 1], [1, w, w2], [1, w2, w]])
    o3 = s * np.array([[1, 1, 1], [w, w2, 1], [w, 1, w2]])
    o4 = s * np.array([[1, 1, 1], [w2, w, 1], [w2, 1, w]])
    return MubSet(
        3, (Basis(o1, "O1"), Basis(o2, "O2"), Basis(o3, "O3"), Basis(o4, "O4"))
    )


def tensor_basis(a: Basis, b: Basis, label: str | None = None) -> Basis:
    """Kronecker product basis; column ``(i, j)`` lands at ``i * b.dim + j``."""
    if label is None:
        label = f"{a.label}x{b.label}"
    return Basis(np.kron(a.matrix, b.matrix), label)


def qusix_mubs() -> MubSet:
    """The three product MUBs I, II, III in dimension six."""
    pol = polarization_mubs()
    oam = oam_qutrit_mubs()
    names = ("I", "II", "III")
    return MubSet(
        6,
        tuple(tensor_basis(pol[k], oam[k], names[k]) for k in range(3)),
    )


def overlap_matrix(a: Basis, b: Basis) -> np.ndarray:
    """``|<a_i|b_j>|^2`` for every pair of columns."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return np.abs(a.matrix.conj().T @ b.matrix) ** 2


def verify_mub_set(s: MubSet, tol: float = DEFAULT_TOL) -> MubReport:
    """Check orthonormality of each basis and unbiasedness of each pair.

    The location is ``("gram", k, i, j)`` or ``("cross", k, l, i, j)`` for the
    worst entry found.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    worst, where = 0.0, ()
    eye = np.eye(s.dim)
    for k, b in enumerate(s.bases):
        dev = np.abs(b.matrix.conj().T @ b.matrix - eye)
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        if dev[i, j] > worst:
            worst, where = float(dev[i, j]), ("gram", k, int(i), int(j))
    for k in range(len(s.bases)):
        for l in range(k + 1, len(s.bases)):
            dev = np.abs(overlap_matrix(s.bases[k], s.bases[l]) - 1 / s.dim)
            i, j = np.unravel_index(np.argmax(dev), dev.shape)
            if dev[i, j] > worst:
                worst, where = float(dev[i, j]), ("cross", k, l, int(i), int(j))
    return MubReport(worst <= tol, worst, where, tol)


def _basis_for_dim(d: int) -> MubSet:
    if d == 2:
        return polarization_mubs()
    if d == 3:
        return oam_qutrit_mubs()
    if d == 6:
        return qusix_mubs()
    return MubSet(d, (computational_basis(d), fourier_basis(d)))


def mub_set_for_dim(d: int) -> MubSet:
    """The set built here for ``d``: explicit for 2, 3, 6, else the Fourier pair."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return _basis_for_dim(d)


def mub_set_to_dict(s: MubSet) -> dict:
    return {
        "dim": s.dim,
        "bases": [
            {
                "label": b.label,
                "columns": [[[float(z.real), float(z.imag)] for z in col] for col in b.columns],
            }
            for b in s.bases
        ],
    }


def mub_set_from_dict(doc: dict) -> MubSet:
    bases = []
    for entry in doc["bases"]:
        cols = np.array(entry["columns"], dtype=float)
        m = (cols[..., 0] + 1j * cols[..., 1]).T
        bases.append(Basis(m, entry["label"]))
    return MubSet(int(doc["dim"]), tuple(bases))


def dumps(s: MubSet, **kwargs) -> str:
    return json.dumps(mub_set_to_dict(s), **kwargs)


def loads(text: str) -> MubSet:
    return mub_set_from_dict(json.loads(text))


def select_bases(s: MubSet, labels: Sequence[str]) -> MubSet:
    return MubSet(s.dim, tuple(s[label] for label in labels))
