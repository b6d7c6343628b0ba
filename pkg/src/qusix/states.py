"""Named states of the qubit, qutrit and qusix MUBs, and the two encodings.

Labels follow ``<basis>:<index>`` with a 1-based index, e.g. ``O2:1``,
``III:6`` or ``pi3:2``.  Qutrit and polarization states may also be named
(``O2:alpha1``, ``pi2:D``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mub import MubSet, oam_qutrit_mubs, polarization_mubs, qusix_mubs
from .optics import OamSuperposition

QUTRIT_CHARGES = (-1, 0, 1)
PURE_OAM_CHARGES = (-3, -2, -1, 1, 2, 3)

POL_NAMES = {"pi1": ("H", "V"), "pi2": ("A", "D"), "pi3": ("L", "R")}
OAM_NAMES = {
    "O1": ("-1", "0", "+1"),
    "O2": ("alpha1", "alpha2", "alpha3"),
    "O3": ("beta1", "beta2", "beta3"),
    "O4": ("gamma1", "gamma2", "gamma3"),
}
QUSIX_NAMES = ("I", "II", "III")
ENCODINGS = ("hybrid", "pure-oam")


class UnknownStateError(KeyError):
    pass


def _split(label: str) -> tuple[str, str]:
    if ":" not in label:
        raise UnknownStateError(f"state label {label!r} is not of the form <basis>:<index>")
    basis, idx = label.split(":", 1)
    return basis.strip(), idx.strip()


def _index(basis: str, idx: str, names: tuple[str, ...]) -> int:
    if idx in names:
        return names.index(idx)
    try:
        k = int(idx)
    except ValueError:
        raise UnknownStateError(f"unknown state {idx!r} in basis {basis}") from None
    if not 1 <= k <= len(names):
        raise UnknownStateError(f"index {k} out of range for basis {basis} (1..{len(names)})")
    return k - 1


def qutrit_state(label: str) -> np.ndarray:
    basis, idx = _split(label)
    if basis not in OAM_NAMES:
        raise UnknownStateError(f"unknown qutrit basis {basis!r}")
    return oam_qutrit_mubs()[basis].state(_index(basis, idx, OAM_NAMES[basis]))


def qubit_state(label: str) -> np.ndarray:
    basis, idx = _split(label)
    if basis not in POL_NAMES:
        raise UnknownStateError(f"unknown polarization basis {basis!r}")
    return polarization_mubs()[basis].state(_index(basis, idx, POL_NAMES[basis]))


@dataclass(frozen=True)
class QusixState:
    label: str
    vector: np.ndarray
    pol: np.ndarray | None = None
    oam: np.ndarray | None = None
    name: str = ""


@dataclass(frozen=True)
class QusixEncoding:
    """The 18 states of bases I, II, III in one physical encoding.

    ``hybrid`` places polarization on the major tensor index and the OAM
    qutrit ``{-1, 0, +1}`` on the minor one; ``pure-oam`` maps the six
    logical levels onto charges ``-3, -2, -1, 1, 2, 3``.
    """

    kind: str
    states: tuple[QusixState, ...]

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.states]

    @property
    def vectors(self) -> np.ndarray:
        return np.array([s.vector for s in self.states]).T

    def mub_set(self) -> MubSet:
        return qusix_mubs()

    def state(self, label: str) -> QusixState:
        basis, idx = _split(label)
        if basis not in QUSIX_NAMES:
            raise UnknownStateError(f"unknown qusix basis {basis!r}")
        k = _index(basis, idx, tuple(str(i + 1) for i in range(6)))
        return self.states[QUSIX_NAMES.index(basis) * 6 + k]

    def oam_superposition(self, label: str) -> OamSuperposition:
        """OAM content to display on the SLM for ``label``."""
        s = self.state(label)
        if self.kind == "hybrid":
            return OamSuperposition.from_vector(QUTRIT_CHARGES, s.oam)
        return OamSuperposition.from_vector(PURE_OAM_CHARGES, s.vector)


def qusix_encoding(kind: str = "hybrid") -> QusixEncoding:
    if kind not in ENCODINGS:
        raise ValueError(f"encoding must be one of {ENCODINGS}, got {kind!r}")
    pol = polarization_mubs()
    oam = oam_qutrit_mubs()
    six = qusix_mubs()
    states = []
    for k, name in enumerate(QUSIX_NAMES):
        pb, ob = pol[k], oam[k]
        pnames, onames = POL_NAMES[pb.label], OAM_NAMES[ob.label]
        for i in range(2):
            for j in range(3):
                col = i * 3 + j
                states.append(
                    QusixState(
                        label=f"{name}:{col + 1}",
                        vector=six[k].state(col),
                        pol=pb.state(i),
                        oam=ob.state(j),
                        name=f"{pnames[i]}/{onames[j]}",
                    )
                )
    return QusixEncoding(kind, tuple(states))


def resolve_superposition(label: str, encoding: str = "hybrid") -> OamSuperposition:
    """OAM superposition for any supported label.

    Qutrit labels (``O1``..``O4``) map onto charges ``-1, 0, +1``; qusix
    labels use ``encoding`` to pick the OAM content.
    """
    basis, _ = _split(label)
    if basis in OAM_NAMES:
        return OamSuperposition.from_vector(QUTRIT_CHARGES, qutrit_state(label))
    if basis in QUSIX_NAMES:
        return qusix_encoding(encoding).oam_superposition(label)
    raise UnknownStateError(f"unknown basis {basis!r} in label {label!r}")


def parse_coeffs(text: str) -> OamSuperposition:
    """Parse ``"m:c, m:c"`` pairs, e.g. ``"-1:1, 1:1j"``; the result is normalised."""
    charges, coeffs = [], []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m, c = part.split(":", 1)
        charges.append(int(m))
        coeffs.append(complex(c.strip().replace("i", "j")))
    v = np.array(coeffs, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError(f"coefficient list {text!r} is all zero")
    return OamSuperposition.from_vector(charges, v / nrm)
