# From an ambient atlas to etale data, and the functor psi back.
# Run: python3 demos/ambient_reduction.py

from artifact.ambient import build_psi, build_ui, build_v_data, cover_reduce, explicit_reduction
from artifact.fixtures import FIX_A_AMB_REDUCTION, fix_a_amb, fix_amb, fix_cover
from artifact.xv import build_xv

# %% two identical Z/2 charts on the swap groupoid
amb = fix_amb()
U12 = build_ui(amb, (1, 2))
print("U_12 has", len(U12.elements), "chart tuples")
for t in U12.elements:
    print("  ", U12.labels[t], "->", U12.psi(t))

# %% a six point cover, shrunk so that only nested index sets touch
space, S, F = fix_cover()
red = cover_reduce(space, S, F)
for I, pts in sorted(red.nonempty().items()):
    print(I, sorted(pts))
print(red.report)

# %% an atlas whose reduction reproduces the two-chart example
atlas = fix_a_amb()
vdata = build_v_data(atlas, explicit_reduction(FIX_A_AMB_REDUCTION))
xv = build_xv(vdata.data)
print("X_V:", len(xv.objects), "objects,", len(xv.morphisms), "morphisms")

psi = build_psi(xv, vdata)
print(psi.report)
print(psi.witnesses, "ambient morphisms were pulled back one chart at a time")
