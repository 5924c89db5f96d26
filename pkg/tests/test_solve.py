import random

import pytest

from cudfsolve import (
    CriteriaSeq,
    InfeasibleInput,
    PackageId,
    ScopeTooLarge,
    SolveLimits,
    Status,
    brute_force,
    build_problem,
    evaluate,
    full_scope,
    generate_instance,
    model_stats,
    parse_criteria,
    parse_document,
    solve,
    solve_document,
    validate_solution,
)
from cudfsolve.solve import Problem

PARANOID = parse_criteria("paranoid")
TRENDY = parse_criteria("trendy")


def pid(name, version):
    return PackageId(name, version)


def pigeonhole(pigeons, holes, criteria=CriteriaSeq(())):
    """Place every pigeon, one per hole: UNSAT when pigeons > holes."""
    names = {(p, h): pid(f"p{p}h{h}", 1) for p in range(pigeons) for h in range(holes)}
    conflicts = []
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                conflicts.append((names[p1, h], frozenset({names[p2, h]})))
    return Problem(
        candidates=tuple(names[p, h] for p in range(pigeons) for h in range(holes)),
        installed=frozenset(),
        requests=tuple(
            frozenset(names[p, h] for h in range(holes)) for p in range(pigeons)
        ),
        depends=(),
        conflicts=tuple(conflicts),
        recommends=(),
        newest={p.name: 1 for p in names.values()},
        criteria=criteria,
    )


def test_scenario_paranoid_optimum(scenario_doc):
    outcome = solve_document(scenario_doc, PARANOID)
    assert outcome.status is Status.OPTIMAL
    assert outcome.solution.objective.key() == (0, 2)
    assert validate_solution(scenario_doc, outcome.solution.installed).ok


def test_scenario_agrees_with_brute_force(scenario_doc):
    for criteria in (PARANOID, TRENDY):
        outcome = solve_document(scenario_doc, criteria)
        oracle = brute_force(scenario_doc, criteria)
        assert outcome.solution.objective.key() == oracle.objective.key()


def test_unsatisfiable_document():
    text = (
        "package: a\nversion: 1\ndepends: b\n\n"
        "package: b\nversion: 1\nconflicts: a\n\n"
        "request: \ninstall: a\n"
    )
    doc = parse_document(text)
    outcome = solve_document(doc, PARANOID)
    assert outcome.status is Status.UNSATISFIABLE
    assert outcome.solution is None
    assert brute_force(doc, PARANOID) is None


def test_infeasible_document_is_detected_before_search():
    doc = parse_document("package: a\nversion: 1\n\nrequest: \ninstall: ghost\n")
    with pytest.raises(InfeasibleInput):
        solve_document(doc, PARANOID)


def test_solutions_match_brute_force_on_small_instances():
    mismatches = []
    for seed in range(40):
        doc = generate_instance(
            seed,
            packages=3 + seed % 8,
            installed_fraction=0.5,
            conflicts_density=0.3,
            upgrade_requests=seed % 2,
            remove_requests=(seed // 2) % 2,
        )
        for criteria in (PARANOID, TRENDY):
            try:
                outcome = solve_document(doc, criteria)
            except InfeasibleInput:
                outcome = None
            if outcome is None or outcome.solution is None:
                got = None
            else:
                got = outcome.solution.objective.key()
                assert validate_solution(doc, outcome.solution.installed).ok
            oracle = brute_force(doc, criteria)
            expected = None if oracle is None else oracle.objective.key()
            if got != expected:
                mismatches.append((seed, str(criteria), got, expected))
    assert not mismatches


def test_engines_agree():
    for seed in range(15):
        doc = generate_instance(
            1000 + seed, packages=25, installed_fraction=0.4, conflicts_density=0.25
        )
        for criteria in (PARANOID, TRENDY):
            try:
                fast = solve_document(doc, criteria, engine="cdcl")
            except InfeasibleInput:
                continue
            slow = solve_document(doc, criteria, engine="bnb")
            assert fast.status is slow.status
            if fast.solution is not None:
                assert fast.solution.objective.key() == slow.solution.objective.key()


def test_closure_does_not_change_the_answer():
    for seed in range(20):
        doc = generate_instance(2000 + seed, packages=20, installed_fraction=0.4)
        try:
            narrow = solve_document(doc, TRENDY, use_closure=True)
        except InfeasibleInput:
            with pytest.raises(InfeasibleInput):
                solve_document(doc, TRENDY, use_closure=False)
            continue
        wide = solve_document(doc, TRENDY, use_closure=False)
        assert narrow.status is wide.status
        if narrow.solution is None:
            assert wide.solution is None
        else:
            assert narrow.solution.objective.key() == wide.solution.objective.key()


def test_vector_of_agrees_with_the_referee():
    rng = random.Random(5)
    for seed in range(12):
        doc = generate_instance(3000 + seed, packages=15, installed_fraction=0.5)
        try:
            problem = build_problem(doc, TRENDY, full_scope(doc))
        except InfeasibleInput:
            continue
        for _ in range(20):
            size = rng.randint(0, len(problem.candidates))
            selection = frozenset(rng.sample(problem.candidates, size))
            assert problem.vector_of(selection).key() == evaluate(
                doc, selection, TRENDY
            ).key()


def test_empty_criteria_returns_any_valid_solution(scenario_doc):
    outcome = solve_document(scenario_doc, CriteriaSeq(()))
    assert outcome.status is Status.OPTIMAL
    assert outcome.solution.objective.values == ()
    assert validate_solution(scenario_doc, outcome.solution.installed).ok


def test_pigeonhole_problems():
    fits = solve(pigeonhole(5, 5))
    assert fits.status is Status.OPTIMAL
    assert len(fits.solution.installed) == 5
    crowded = solve(pigeonhole(6, 5))
    assert crowded.status is Status.UNSATISFIABLE


def test_conflict_budget_gives_up_cleanly():
    outcome = solve(pigeonhole(7, 6), limits=SolveLimits(max_steps=1, wall_clock=None))
    assert outcome.status is Status.TIMED_OUT
    assert outcome.solution is None


def test_budget_exhaustion_keeps_the_incumbent():
    problem = pigeonhole(7, 7, criteria=parse_criteria("-new"))
    outcome = solve(problem, limits=SolveLimits(max_steps=1, wall_clock=None))
    assert outcome.status is Status.TIMED_OUT
    # the first model was found without a single conflict; tightening it
    # ran out of budget, so we keep what we have
    assert outcome.solution is not None
    assert outcome.solution.objective.key() == (7,)


def test_bnb_node_budget():
    problem = pigeonhole(4, 4, criteria=parse_criteria("-new"))
    outcome = solve(problem, limits=SolveLimits(max_steps=3, wall_clock=None), engine="bnb")
    assert outcome.status is Status.TIMED_OUT


def test_bnb_refuses_large_scopes():
    doc = generate_instance(7, packages=500, installed_fraction=0.2)
    try:
        problem = build_problem(doc, PARANOID, full_scope(doc))
    except InfeasibleInput:
        pytest.skip("unlucky seed: request not satisfiable")
    with pytest.raises(ScopeTooLarge):
        solve(problem, engine="bnb")


def test_brute_force_refuses_large_scopes():
    doc = generate_instance(8, packages=30)
    with pytest.raises(ScopeTooLarge):
        brute_force(doc, PARANOID)


def test_unknown_engine():
    with pytest.raises(ValueError):
        solve(pigeonhole(2, 2), engine="dpll")


def test_model_stats(scenario_doc):
    problem = build_problem(scenario_doc, PARANOID, full_scope(scenario_doc))
    stats = model_stats(problem)
    assert stats["candidates"] == 11
    assert stats["variables"] >= stats["candidates"]
    assert stats["clauses"] > 0
    assert stats["count_literals"] > 0


def test_solving_is_deterministic(scenario_doc):
    first = solve_document(scenario_doc, TRENDY)
    second = solve_document(scenario_doc, TRENDY)
    assert first.solution.installed == second.solution.installed
    assert str(first.solution.objective) == str(second.solution.objective)
