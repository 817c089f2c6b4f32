"""Inter-profession agreement on the bundled synthetic survey.

Loads the 4-profession demo panel (HGV drivers, fleet managers, researchers,
road-safety experts), prints per-group summaries and the Jaccard similarity
between professions for every contextual factor.

Run:  python demos/03_profession_similarity.py
"""

from iaarisk import data_path
from iaarisk.elicitation import parse_factor_manifest, parse_responses, similarity_matrix, summarize

panel = parse_responses(data_path("demo_panel.csv").read_text())
manifest = parse_factor_manifest(data_path("demo_manifest.csv").read_text())
print(f"{len(panel)} responses, factors: {', '.join(panel.factors)}")

# %% Box-plot style statistics over interval midpoints
print("\nfactor               prof  n  q1   med  q3   mode  width")
for s in summarize(panel)[:8]:
    print(f"{s.factor:20s} {s.profession:4s} {s.count}  {s.q1:.2f} {s.median:.2f} {s.q3:.2f} {s.mode:>4d}  {s.mean_width:.2f}")

# %% Similarity matrices
for factor in panel.factors:
    mat = similarity_matrix(panel, factor)
    info = manifest.get(factor)
    print(f"\n{info.display_name if info else factor} ({info.category if info else '?'})")
    print("      " + "  ".join(f"{p:>5s}" for p in mat.labels))
    for p, row in zip(mat.labels, mat.values):
        print(f"{p:>5s} " + "  ".join(f"{v:5.2f}" for v in row))
