"""
Reading and writing upgrade documents
=====================================

An upgrade problem is plain text: one stanza per package version,
blank-line separated, with an optional request stanza at the end.
Parsing yields an immutable document; rendering turns it back into
text, byte for byte.
"""

from pathlib import Path

from cudfsolve import parse_document, render_document, render_formula

text = Path(__file__).with_name("upgrade.cudf").read_text()
doc = parse_document(text)

print(f"{len(doc.packages)} package stanzas")
for pkg in doc.packages:
    notes = []
    if pkg.installed:
        notes.append("installed")
    for label, formula in (
        ("depends", pkg.depends),
        ("conflicts", pkg.conflicts),
        ("provides", pkg.provides),
        ("recommends", pkg.recommends),
    ):
        if formula.clauses:  # trivially-true formulas stand for "not given"
            notes.append(f"{label}: {render_formula(formula)}")
    print(f"  {pkg.id.name} {pkg.id.version}" + (f"  ({'; '.join(notes)})" if notes else ""))

req = doc.request
print("request:")
print("  install:", render_formula(req.install) if req.install else "-")
print("  upgrade:", render_formula(req.upgrade) if req.upgrade else "-")
print("  remove: ", render_formula(req.remove) if req.remove else "-")

# rendering is canonical (stable property order, one space after the
# colon), and parsing its output always gives the same document back
canonical = render_document(doc)
assert parse_document(canonical) == doc
print("\nround-trip: document -> text -> document is exact")
