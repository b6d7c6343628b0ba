import numpy as np
import pytest

from qusix.kinoform import generation_report
from qusix.mub import oam_qutrit_mubs
from qusix.optics import OamSuperposition
from qusix.states import PURE_OAM_CHARGES, QUTRIT_CHARGES, qusix_encoding


def qutrit_states():
    o = oam_qutrit_mubs()
    return [OamSuperposition.from_vector(QUTRIT_CHARGES, o[k].state(j)) for k in range(3) for j in range(3)]


def pure_oam_states():
    enc = qusix_encoding("pure-oam")
    return [OamSuperposition.from_vector(PURE_OAM_CHARGES, s.vector) for s in enc.states]


@pytest.fixture(scope="session")
def qutrit_report():
    return generation_report(qutrit_states())


@pytest.fixture(scope="session")
def qusix_report():
    return generation_report(pure_oam_states())


def block_mask(n_blocks, size):
    return np.kron(np.eye(n_blocks, dtype=bool), np.ones((size, size), dtype=bool))
