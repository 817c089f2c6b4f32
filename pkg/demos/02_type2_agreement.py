"""Aggregating profession sets into a zSlice type-2 set.

Stacking the two profession sets from demo 01 gives z-levels 1/2 and 1.
The secondary grade at (x, y) is the share of professions whose grade at x
reaches y: regions where both professions agree get z = 1.

Run:  python demos/02_type2_agreement.py
"""

from iaarisk import Interval, aggregate_zgt2, build_iaa, centroid_t1, centroid_zgt2, secondary_grade, zslice
from iaarisk.fuzzy_core import mean_function

a = build_iaa([Interval(1, 2), Interval(1, 3), Interval(2, 4)])
b = build_iaa([Interval(1, 5), Interval(1.5, 4), Interval(1, 6)])
z = aggregate_zgt2([("A", a), ("B", b)])
print("z-levels:", [str(q) for q in z.z_levels])

# %% Slices: slice 1 is the pointwise max (footprint), slice M the min (full agreement)
for j in (1, 2):
    s = zslice(z, j)
    print(f"slice {j}:", [(float(lo), float(hi), str(v)) for lo, hi, v in s.cells()])

# %% Secondary grades at a few points
for x, y in [(2, 0.9), (3.5, 0.3), (5.5, 0.2), (8, 0.1)]:
    print(f"z({x}, {y}) = {secondary_grade(z, x, y)}")

# %% Shading grid as the CLI's export-plot would write it
from iaarisk import sample  # noqa: E402

grid = sample(z, 0.5, 0.25)
dark = sum(1 for _, _, zv in grid if zv == 1)
print(f"\ngrid rows: {len(grid)}, fully agreed cells: {dark}")

# %% Crisp impact: centroid of the mean group function
print("centroid A:", centroid_t1(a.fn), " centroid B:", round(centroid_t1(b.fn), 4))
print("type-2 centroid:", round(centroid_zgt2(z), 6))
print("same via mean function:", round(centroid_t1(mean_function([a.fn, b.fn])), 6))
