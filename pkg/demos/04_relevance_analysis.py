"""Relevance z-scores: locating *which* groups differ and testing focused
sub-questions without re-running the whole pipeline.

Scenario: four groups where the block structure is hidden — groups 1 and 4
share one distribution, groups 2 and 3 share another (shifted).  An analyst
who pools the wrong groups ({1,2} vs {3,4}) compares two identical mixtures
and finds nothing.  The pairwise z grid exposes the real structure, and a
focused test on the informative pairs rejects decisively.

Run:  python3 demos/04_relevance_analysis.py
"""

import numpy as np

from relevance_kit import (
    GroupAssignment,
    MomentContext,
    WeightMatrix,
    approximate_shp,
    count_edges,
    gamma_cost,
    minimum_test,
    relevance_report,
    weighted_sum_test,
)

rng = np.random.default_rng(44)

# --- data: 1 ~ 4 (baseline), 2 ~ 3 (shifted) -------------------------------
sizes = (20, 20, 20, 20)
d = 400
shift = 0.50

blocks = []
for g in range(1, 5):
    block = rng.standard_normal((sizes[g - 1], d))
    if g in (2, 3):
        block[:, : d // 2] += shift
    blocks.append(block)
data = np.vstack(blocks)
labels = np.repeat([1, 2, 3, 4], sizes)
groups = GroupAssignment.from_labels(labels)
ctx = MomentContext(groups.sizes)

print(f"N={data.shape[0]}, k=4 groups of 20, d={d}")
print(f"hidden structure: groups 2 and 3 shifted by {shift} on {d // 2} coords\n")

path = approximate_shp(gamma_cost(data, gamma=1.0))
table = count_edges(path, groups)

# --- 1. pairwise z grid ----------------------------------------------------
report = relevance_report(
    path,
    groups,
    combined=[((1, 2), (3, 4)), ((1, 4), (2, 3))],
)

print("pairwise relevance z (negative = fewer crossings than chance = differ):")
print("        g1      g2      g3      g4")
for m in range(4):
    cells = []
    for l in range(4):
        v = report.z[m, l]
        cells.append("   .  " if np.isnan(v) else f"{v:+6.2f}")
    print(f"   g{m + 1} " + "  ".join(cells))

flat = [(m + 1, l + 1, report.z[m, l]) for m in range(4) for l in range(m + 1, 4)]
flat.sort(key=lambda t: t[2])
print("\nmost to least discrepant pairs:")
for m, l, v in flat:
    tag = "differ" if v < -2 else ("mix" if v > -1 else "borderline")
    print(f"   ({m},{l}): z = {v:+6.2f}   [{tag}]")

# --- 2. union comparisons: wrong pooling vs right pooling ------------------
z_wrong = report.combined[((1, 2), (3, 4))]
z_right = report.combined[((1, 4), (2, 3))]
print("\ncombined-union z-scores:")
print(f"   {{1,2}} vs {{3,4}} (wrong pooling, identical mixtures): z = {z_wrong:+6.2f}")
print(f"   {{1,4}} vs {{2,3}} (matches hidden structure):         z = {z_right:+6.2f}")

# --- 3. the same contrast as formal tests ----------------------------------
# (a) merge along the wrong split and run the two-sample test
merged_wrong = GroupAssignment.from_labels(np.where(labels <= 2, 1, 2))
ctx2 = MomentContext(merged_wrong.sizes)
t_wrong = count_edges(path, merged_wrong)
res_wrong = weighted_sum_test(t_wrong, WeightMatrix.default(ctx2), ctx2)

# (b) keep all four groups but zero out the pairs the grid calls homogeneous,
#     concentrating the test on the informative comparisons
w_focused = WeightMatrix.default(ctx).with_zeroed_pairs([(1, 4), (2, 3)])
res_ws = weighted_sum_test(table, w_focused, ctx)
res_min = minimum_test(table, w_focused, ctx)

print("\nformal tests at alpha = 0.05:")
print(f"   merged {{1,2}} vs {{3,4}}   : p = {res_wrong.p_value:.4f}   reject? {res_wrong.reject}")
print(f"   focused ws  (4 pairs)    : p = {res_ws.p_value:.2e}   reject? {res_ws.reject}")
print(f"   focused min (4 pairs)    : p = {res_min.p_value:.2e}   reject? {res_min.reject}")
print("\nthe pooled comparison hides the effect; the z grid finds it, and the")
print("zeroed-pair weights turn that insight into a sharper formal test.")
