# Limits of finitely presented towers, and the dual tower identity.
# Run: python3 demos/towers.py

import random

from artifact.linalg import QMatrix
from artifact.qtower import DirectQTower, QTower, check_dual_iso, colim, dualize, lim, lim1

# %% the three named tails on Q^2
for name, rows in [("identity", [[1, 0], [0, 1]]), ("nilpotent", [[0, 1], [0, 0]]),
                   ("projector", [[1, 0], [0, 0]])]:
    tower = QTower.constant(QMatrix.from_rows(rows))
    print(f"{name:10s} lim {lim(tower).dim}  lim1 {lim1(tower).dim}  "
          f"settles after {lim1(tower).certificate}")

# %% a prefix can hide part of the limit at the first space
tower = QTower([1, 2], [QMatrix.from_rows([[0, 1]])], QMatrix.from_rows([[1, 0], [0, 0]]))
res = lim(tower)
print("dim", res.dim, "entries at W_1", res.first_basis)

# %% dualizing a direct tower; colim and lim of the dual always match
rng = random.Random(7)
for _ in range(5):
    n = rng.randint(1, 4)
    tail = QMatrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
    direct = DirectQTower.constant(tail)
    print(n, "colim", colim(direct), "lim of dual", lim(dualize(direct)).dim,
          "ok" if check_dual_iso(direct).ok else "MISMATCH")
