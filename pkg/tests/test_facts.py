import pytest

from cudfsolve import (
    InfeasibleInput,
    PackageId,
    SetId,
    compute_closure,
    full_scope,
    generate_facts,
    parse_criteria,
    parse_document,
    render_facts,
)

PARANOID = parse_criteria("paranoid")
TRENDY = parse_criteria("trendy")


def pid(name, version):
    return PackageId(name, version)


def sid(ordinal):
    return SetId(ordinal)


@pytest.fixture()
def scenario_facts(scenario_doc):
    closure = compute_closure(scenario_doc, PARANOID)
    return generate_facts(scenario_doc, PARANOID, closure)


def test_units_are_the_closure(scenario_doc, scenario_facts):
    closure = compute_closure(scenario_doc, PARANOID)
    assert scenario_facts.units == closure.closure
    assert len(scenario_facts.units) == 9


def test_installed_packages_are_always_listed(scenario_facts):
    # conf 1 is ruled out of the candidates, yet the objective still
    # needs to know it was installed
    assert scenario_facts.installed == {
        pid("conf", 1),
        pid("dep", 1),
        pid("avail", 1),
    }
    assert pid("conf", 1) not in scenario_facts.units


def test_newest_versions_cover_candidate_names_only(scenario_facts):
    assert scenario_facts.newest == {
        "inst": 3,
        "conf": 2,
        "feat": 1,
        "dep": 3,
        "avail": 1,
    }


def test_depends_facts(scenario_facts):
    assert scenario_facts.depends == (
        (pid("inst", 2), sid(1)),
        (pid("inst", 1), sid(2)),
    )
    assert scenario_facts.members[sid(1)] == {pid("dep", 1)}
    assert scenario_facts.members[sid(2)] == {
        pid("dep", 1),
        pid("dep", 2),
        pid("dep", 3),
    }


def test_conflict_facts_reuse_interned_sets(scenario_facts):
    conflicts = dict(scenario_facts.conflicts)
    # declared conflicts
    assert conflicts[pid("inst", 3)] == sid(3)
    assert conflicts[pid("dep", 3)] == sid(4)
    assert conflicts[pid("dep", 2)] == sid(1)  # same set as inst 2's depends
    # upgrade rivalry: conf 2 and feat 1 provide different versions of
    # the upgraded name, so each blocks the other
    assert conflicts[pid("conf", 2)] == sid(5)
    assert conflicts[pid("feat", 1)] == sid(3)  # {conf 2} again
    assert scenario_facts.members[sid(3)] == {pid("conf", 2)}
    assert scenario_facts.members[sid(4)] == {pid("dep", 1), pid("dep", 2)}
    assert scenario_facts.members[sid(5)] == {pid("feat", 1)}


def test_request_facts(scenario_facts):
    assert scenario_facts.requests == (sid(6), sid(7))
    assert scenario_facts.members[sid(6)] == {
        pid("inst", 1),
        pid("inst", 2),
        pid("inst", 3),
    }
    assert scenario_facts.members[sid(7)] == {pid("conf", 2), pid("feat", 1)}


def test_satisfies_enumerates_every_referenced_set(scenario_facts):
    assert len(scenario_facts.satisfies) == 13
    by_set = {}
    for member, set_id in scenario_facts.satisfies:
        by_set.setdefault(set_id, set()).add(member)
    assert by_set == {
        s: members for s, members in scenario_facts.members.items() if s in by_set
    }
    assert set(by_set) == {sid(i) for i in range(1, 8)}


def test_criterion_facts_number_positions_from_least_significant(scenario_facts):
    assert scenario_facts.criteria == (("change", -1), ("remove", -2))


def test_trendy_criterion_facts(scenario_doc):
    closure = compute_closure(scenario_doc, TRENDY)
    facts = generate_facts(scenario_doc, TRENDY, closure)
    assert facts.criteria == (
        ("newpackage", -1),
        ("recommend", -2),
        ("uptodate", -3),
        ("remove", -4),
    )


def test_recommends_facts_only_exist_when_ranked(scenario_doc):
    paranoid = generate_facts(
        scenario_doc, PARANOID, compute_closure(scenario_doc, PARANOID)
    )
    assert paranoid.recommends == ()
    trendy = generate_facts(scenario_doc, TRENDY, compute_closure(scenario_doc, TRENDY))
    assert len(trendy.recommends) == 1
    owner, set_id, weight = trendy.recommends[0]
    assert owner == pid("dep", 3) and weight == 1
    assert trendy.members[set_id] == {pid("recomm", 1)}


def test_equal_recommendation_clauses_merge_with_multiplicity():
    text = (
        "package: a\nversion: 1\nrecommends: b, b | b >= 1, c\n\n"
        "package: b\nversion: 1\n\n"
        "package: c\nversion: 1\n\n"
        "request: \n"
    )
    doc = parse_document(text)
    criteria = parse_criteria("-unsat_recommends")
    facts = generate_facts(doc, criteria, full_scope(doc))
    weights = {
        frozenset(facts.members[set_id]): weight
        for _, set_id, weight in facts.recommends
    }
    assert weights == {
        frozenset({pid("b", 1)}): 2,  # `b` and `b | b >= 1` hit the same set
        frozenset({pid("c", 1)}): 1,
    }


def test_infeasible_closure_refuses_to_generate():
    doc = parse_document("package: a\nversion: 1\n\nrequest: \ninstall: ghost\n")
    with pytest.raises(InfeasibleInput):
        generate_facts(doc, PARANOID, compute_closure(doc, PARANOID))


def test_facts_shrink_with_the_closure(scenario_doc):
    narrow = generate_facts(scenario_doc, PARANOID, compute_closure(scenario_doc, PARANOID))
    wide = generate_facts(scenario_doc, PARANOID, full_scope(scenario_doc))
    assert narrow.units < wide.units
    assert pid("option", 1) in wide.units


def test_rendered_facts_are_line_oriented_and_sorted(scenario_facts):
    text = render_facts(scenario_facts)
    lines = text.splitlines()
    assert lines[0] == "unit(avail,1)."
    assert all(line.endswith(".") for line in lines)
    kinds = [line.split("(")[0] for line in lines]
    expected = ["unit", "installed", "newestversion", "depends", "conflict",
                "request", "satisfies", "criterion"]
    assert [k for k in expected if k in kinds] == expected
    # stable kind grouping: units first, criteria last
    assert kinds == sorted(kinds, key=expected.index)


def test_awkward_names_are_quoted():
    text = (
        "package: libstdc++6\nversion: 1\n\n"
        "request: \ninstall: libstdc++6\n"
    )
    doc = parse_document(text)
    facts = generate_facts(doc, PARANOID, full_scope(doc))
    rendered = render_facts(facts)
    assert 'unit("libstdc++6",1).' in rendered


def test_render_of_empty_facts():
    doc = parse_document("request: \n")
    facts = generate_facts(doc, parse_criteria(""), full_scope(doc))
    assert render_facts(facts) == ""
