"""The curated gallery and the separating-example search.

The gallery pins, for a dozen functions, which classes they belong to (no
violation found at a pinned resolution) and which they provably leave (a
stored witness).  The search hunts for random functions that separate two
classes along the inclusion chain; exhaustion is an honest outcome, since
some of the proper inclusions have no known computable separating example.
"""

from quasiconv import (
    ClassId,
    PiecewiseLinear,
    SearchConfig,
    load_gallery,
    search_separation,
    validate_gallery,
)

entries = load_gallery()
print(f"gallery: {len(entries)} entries")
for e in entries:
    ins = ", ".join(c.value for c in e.claimed_in) or "-"
    outs = ", ".join(c.value for c in e.claimed_not_in) or "-"
    print(f"  {e.name:13s} {e.expr_text:22s} in: {ins}")
    print(f"  {'':13s} {'':22s} not in: {outs}")

results = validate_gallery(entries)
print(f"\nvalidation: {sum(r.ok for r in results)}/{len(results)} claims re-validated")

# Quasi-convex but not convex: monotone ramps with a downward slope change
# separate the two classes almost immediately.
cfg = SearchConfig(
    target_in=ClassId.QC2,
    target_not_in=ClassId.C2,
    family=PiecewiseLinear(4),
    trials=100,
    seed=7,
)
print("\nsearching for a QC2-but-not-C2 function:")
print(search_separation(cfg).describe())

# The gap between WQC and JQC is beyond this family: every sampled function
# that is midpoint-quasi-convex here is also chord-average-quasi-convex.
cfg = SearchConfig(
    target_in=ClassId.JQC2,
    target_not_in=ClassId.WQC2,
    family=PiecewiseLinear(4),
    trials=25,
    seed=0,
)
print("\nsearching for a JQC2-but-not-WQC2 function:")
print(search_separation(cfg).describe())
