"""Building interval-agreement fuzzy sets from expert intervals.

Three experts in profession A answer one question with intervals on the
1-9 impact scale; three experts in profession B answer the same question
with wider intervals. Each group becomes one type-1 fuzzy set whose grade at
x is the share of experts whose interval contains x.

Run:  python demos/01_interval_agreement.py
"""

from fractions import Fraction

import numpy as np

from iaarisk import Interval, build_iaa, membership, sample
from iaarisk.fuzzy_core import area, evaluate

# %% Profession A: fairly certain answers
group_a = build_iaa([Interval(1, 2), Interval(1, 3), Interval(2, 4)])
fn = group_a.fn
print("profession A")
print("  breakpoints:", [str(b) for b in fn.breakpoints])
print("  cell grades:", [str(v) for v in fn.values])
print("  spikes     :", {str(x): str(g) for x, g in fn.point_overrides})
print("  mu(2) =", membership(fn, 2), "<- every expert includes 2")

# %% Profession B: same question, more uncertain answers
group_b = build_iaa([Interval(1, 5), Interval(1.5, 4), Interval(1, 6)])
print("\nprofession B")
print("  cell grades:", [str(v) for v in group_b.fn.values])
print(f"  area A = {float(area(fn)):.3f}, area B = {float(area(group_b.fn)):.3f}  (B is wider)")

# %% Tabulate on a unit grid (exact fractions)
print("\n  x  mu_A  mu_B")
for (x, ga), (_, gb) in zip(sample(group_a, 1), sample(group_b, 1)):
    print(f"  {x}  {str(ga):>4}  {str(gb):>4}")

# %% Dense float evaluation for plotting libraries
xs = np.linspace(1, 9, 801)
ys = evaluate(fn, xs)
print(f"\nfloat curve: {xs.size} points, max grade {ys.max():.3f} at x={xs[ys.argmax()]:.2f}")

# A single certain answer is a degenerate interval: a spike with no area
certain = build_iaa([Interval(9, 9)])
print("certain answer [9, 9]: mu(9) =", membership(certain.fn, 9), "area =", area(certain.fn))
assert membership(fn, Fraction(5, 2)) == Fraction(2, 3)
