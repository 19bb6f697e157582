# The two-chart running example, built and taken apart step by step.
# Run: python3 demos/fix_a_groupoid.py

from artifact.fixtures import fix_a
from artifact.groupoid import check_category, realize
from artifact.xv import build_q, build_xv, build_xv_minus_g, check_case_agreement, q_minima

# %% the etale data: Z/2 on chart 1, trivial group on chart 2
data = fix_a()
for J in data.index_sets:
    print(J, data.space(J))

# %% the groupoid X_V
xv = build_xv(data)
print("objects", len(xv.objects), "morphisms", len(xv.morphisms))
print("classes", [c for c in realize(xv).classes])

# every composable triple is checked, so this is the slow line on big inputs
print(check_category(xv))

overlaps, disagreements = check_case_agreement(xv)
print(overlaps, "pairs where several composition rules apply;", len(disagreements), "disagree")

# %% composing by hand: into V_12 along u, then back out to V_1 along u
m1 = ((1,), (1, 2), "u", ("e",))
m2 = ((1, 2), (1,), "u", ("e",))
print(xv.compose(m1, m2), "is the identity of", xv.source(m1))

# %% the poset Q and its class minima
q = build_q(data)
real, minima = q_minima(q)
for label, roots in minima.items():
    print(real.members(label), "minimum", roots)

# %% X_V minus G: three classes, two G-orbits, and the quotient matches X_V
result = build_xv_minus_g(data, xv)
print(result.report)
