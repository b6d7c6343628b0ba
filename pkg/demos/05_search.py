"""Look for a state unbiased to every basis in a set.

In three dimensions such a state exists and the search finds a column of
the fourth basis.  In six dimensions the residual stalls well above zero,
which is evidence (not proof) that the qusix set cannot be extended.
"""

import numpy as np

from qusix.mub import oam_qutrit_mubs, qusix_mubs, select_bases
from qusix.search import SearchConfig, search_extension_vector

o = oam_qutrit_mubs()
r = search_extension_vector(select_bases(o, ["O1", "O2", "O3"]), SearchConfig(restarts=20, seed=1))
best = np.abs(o["O4"].matrix.conj().T @ r.best_vector) ** 2
print(f"d=3: residual {r.residual:.1e}, overlap with a column of O4 = {best.max():.6f}")

r = search_extension_vector(qusix_mubs(), SearchConfig(restarts=200, seed=1))
print(f"d=6: best residual after 200 restarts {r.residual:.4f}")
print("     spread of restart residuals:", np.round(np.percentile(r.all_residuals, [0, 50, 100]), 4))
