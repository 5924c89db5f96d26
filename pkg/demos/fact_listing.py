"""Compiling a document into solver-ready facts.

The fact program names every surviving package version, what it
depends on and clashes with, the request, and the ranked objectives.
Version sets that occur in several places are interned once and
referred to by token, so shared member lists are easy to spot.
"""

from pathlib import Path

from cudfsolve import compute_closure, generate_facts, parse_criteria, parse_document, render_facts

doc = parse_document(Path(__file__).with_name("upgrade.cudf").read_text())
criteria = parse_criteria("-removed,-changed")
facts = generate_facts(doc, criteria, compute_closure(doc, criteria))

print(render_facts(facts))

print("# interned version sets:")
for token, members in sorted(facts.members.items(), key=lambda kv: str(kv[0])):
    listing = ", ".join(f"{p.name} {p.version}" for p in sorted(members))
    print(f"#   {token} = {{{listing}}}")
