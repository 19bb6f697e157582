# A sign-twisted stabilization on the two-chart atlas and the count it gives.
# Run: python3 demos/stabilization_count.py

from fractions import Fraction

from artifact.ambient import explicit_reduction
from artifact.bundle import GroupoidBundle, Section
from artifact.fixtures import FIX_A_AMB_REDUCTION, fix_a_amb
from artifact.linalg import QMatrix, format_vec
from artifact.stabilization import (
    FredholmModel, LocalStabilization, Pipeline, count, lambda_ve, partition_from_reduction,
    stabilize, theta_through_psi,
)

atlas = fix_a_amb()
pipe = Pipeline(atlas, explicit_reduction(FIX_A_AMB_REDUCTION))

# %% a trivial line bundle with the zero section
bundle = GroupoidBundle.trivial(atlas.ambient)
fm = FredholmModel(bundle, Section.zero(bundle))

# %% E_1 = Q with s acting by -1; tau_1 is +1 on A, C and -1 on their swaps
chart = atlas.chart(1)
local = LocalStabilization(1, chart, 1, {("A", 0): [1], ("B", 0): [-1], ("C", 0): [1],
                                         ("D", 0): [-1]}, {"s": QMatrix.from_rows([[-1]])})

pu = partition_from_reduction(atlas, pipe.reduction)
wv, tau = stabilize(pipe, fm, {1: local}, pu)
print(tau.report)

for obj in pipe.xv.objects:
    print(obj, format_vec(tau(obj, (1,))))

# %% Lambda_(V,e) for e = 1/2: two sheets of weight 1/2 wherever tau is nonzero
e = (Fraction(1, 2),)
lam = lambda_ve(tau, e)
for (obj, w), weight in lam.multisection.table().items():
    print(obj, format_vec(w), weight)

# %% Theta on X_V and on the ambient side agree class by class
th_v, th, pushed, rep = theta_through_psi(pipe, fm, lam.multisection, wv)
print(rep)
print("class weights", {c: str(w) for c, w in th.class_weights.items()}, "count", count(th))
