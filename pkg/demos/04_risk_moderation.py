"""Moderating driver risk scores with contextual impact scores.

Four drivers with base risk scores from an incident-based scoring system.
Each faced two conditions; the impact scores of those conditions are merged
(mean), mapped from the 1-9 scale onto a [0.5, 1.5] multiplier and
multiplied into the base score.

Run:  python demos/04_risk_moderation.py
"""

from iaarisk import data_path
from iaarisk.elicitation import build_factor_zgt2, parse_responses
from iaarisk.moderation import ImpactRegistry, ModerationConfig, moderate

registry = ImpactRegistry.paper_defaults()
drivers = [
    ("A", 83.09, ["high_time_pressure", "rainy"]),
    ("B", 83.09, ["low_time_pressure", "rainy"]),
    ("C", 75.24, ["absence_of_cameras", "energetic"]),
    ("D", 75.24, ["presence_of_cameras", "energetic"]),
]

# %% Default policy: impacts 2 dp, joint exact, multiplier 3 dp, score 2 dp
for name, base, conds in drivers:
    r = moderate(base, conds, registry)
    print(f"driver {name}: {base:.2f}% -> {r.moderated_score:.2f}%  (joint {r.joint_effect:.3f}, x{r.multiplier:.3f})")

print("\naudit trail for driver A:")
print("\n".join("  " + line for line in moderate(83.09, drivers[0][2], registry).audit))

# %% Alternative strategies
cfg_min = ModerationConfig(ensemble="min")
cfg_wide = ModerationConfig(norm_lo=0.25, norm_hi=1.75)
for name, base, conds in drivers:
    print(
        f"driver {name}: min-ensemble {moderate(base, conds, registry, cfg_min).moderated_score:6.2f}%"
        f"   [0.25,1.75] {moderate(base, conds, registry, cfg_wide).moderated_score:6.2f}%"
    )

# %% Impact scores computed from survey responses instead of constants
panel = parse_responses(data_path("paper_fixture_responses.csv").read_text())
computed = ImpactRegistry.from_zgt2({f: build_factor_zgt2(panel, f) for f in panel.factors})
print("\nimpacts from the fixture panel:", dict(computed))
