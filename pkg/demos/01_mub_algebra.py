"""Build the qubit, qutrit and qusix bases and check they are mutually unbiased.

The six-dimensional set is a tensor product of three polarization bases
with three of the four qutrit OAM bases.  Run with ``python3 01_mub_algebra.py``.
"""

import numpy as np

from qusix import oam_qutrit_mubs, polarization_mubs, qusix_mubs, verify_mub_set
from qusix.mub import overlap_matrix

for s in (polarization_mubs(), oam_qutrit_mubs(), qusix_mubs()):
    rep = verify_mub_set(s)
    print(f"d={s.dim}: {', '.join(s.labels):<15} max deviation {rep.max_deviation:.1e}")

six = qusix_mubs()
print("\n|<I_i|II_j>|^2, every entry should be 1/6:")
print(np.round(overlap_matrix(six["I"], six["II"]), 4))

np.set_printoptions(precision=3, suppress=True, linewidth=120)
print("\nbasis III columns times sqrt(6):")
print(six["III"].matrix * np.sqrt(6))
