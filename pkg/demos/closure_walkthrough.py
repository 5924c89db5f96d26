"""Trimming the universe before solving.

Two trimming steps run before any search: packages the request already
dooms are ruled *out*, and everything that cannot influence the chosen
objective is left behind.  Which packages survive depends on the
criteria — minimising unsatisfied recommendations keeps recommended
packages alive that a pure removal count would discard.
"""

from pathlib import Path

from cudfsolve import compute_closure, compute_out, parse_criteria, parse_document

doc = parse_document(Path(__file__).with_name("upgrade.cudf").read_text())
universe = [p.id for p in doc.packages]
print(f"universe: {len(universe)} package versions")

# `upgrade: conf > 1` means no version of conf at or below 1 may stay,
# so (conf, 1) is decided before the solver ever runs
out = compute_out(doc)
print("ruled out by the request:", ", ".join(f"{p.name} {p.version}" for p in sorted(out)))

for chosen in ("-removed,-changed", "-removed,-changed,-unsat_recommends"):
    result = compute_closure(doc, parse_criteria(chosen))
    kept = sorted(result.closure)
    print(f"\ncriteria {chosen}")
    print(f"  closure: {len(kept)} of {len(universe)}"
          f" (feasible={result.feasible}, extra rounds={result.iterations})")
    print("  kept:   ", ", ".join(f"{p.name} {p.version}" for p in kept))
    dropped = sorted(set(universe) - result.closure - result.out)
    print("  dropped:", ", ".join(f"{p.name} {p.version}" for p in dropped) or "-")

# (recomm, 1) only matters when unsatisfied recommendations are scored;
# (option, 1) is unreachable either way, and (avail, 1) stays only
# because removing an installed package is always scored.
