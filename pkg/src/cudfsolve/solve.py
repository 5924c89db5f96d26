"""Lexicographic optimization of package selections.

The compiled problem (candidate packages plus provider sets for
requests, dependencies, conflicts and recommendations) is turned into
a propositional model: one variable per candidate, plus derived
per-name variables for the objective counts.  Criteria are optimized
one at a time, most significant first; each level is tightened by a
descending bound until the solver reports the bound unreachable, then
frozen at its optimum while the next level runs.

Two engines are available: ``"cdcl"`` (clause learning with native
counting bounds, the default) and ``"bnb"`` (plain depth-first branch
and bound, kept as an independent reference for modest inputs).  For
tiny universes :func:`brute_force` grinds through every subset and is
the final word in disagreements.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from time import monotonic
from typing import Mapping

from .closure import ClosureResult, compute_closure, full_scope
from .criteria import CriteriaSeq, Criterion, Polarity
from .errors import ScopeTooLarge
from .facts import generate
from .model import CudfDocument, PackageId
from .sat import Result, Solver
from .semantics import DocIndex, ObjectiveValue, ObjectiveVector, evaluate, validate_solution

_BNB_LIMIT = 400


class Status(enum.Enum):
    OPTIMAL = "optimal"
    UNSATISFIABLE = "unsatisfiable"
    TIMED_OUT = "timed-out"


@dataclass(frozen=True)
class SolveLimits:
    max_steps: int | None = None  # conflict budget (cdcl) / node budget (bnb)
    wall_clock: float | None = 300.0


@dataclass(frozen=True)
class Solution:
    installed: frozenset[PackageId]
    objective: ObjectiveVector


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    solution: Solution | None = None


@dataclass(frozen=True)
class Problem:
    """A compiled instance: candidates plus provider-set constraints."""

    candidates: tuple[PackageId, ...]
    installed: frozenset[PackageId]
    requests: tuple[frozenset[PackageId], ...]
    depends: tuple[tuple[PackageId, frozenset[PackageId]], ...]
    conflicts: tuple[tuple[PackageId, frozenset[PackageId]], ...]
    recommends: tuple[tuple[PackageId, frozenset[PackageId], int], ...]
    newest: Mapping[str, int] = field(default_factory=dict)
    criteria: CriteriaSeq = field(default_factory=lambda: CriteriaSeq(()))

    def vector_of(self, chosen: frozenset[PackageId]) -> ObjectiveVector:
        """Objective vector of a selection drawn from the candidates."""
        o_names = {p.name for p in self.installed}
        p_names = {p.name for p in chosen}
        values = []
        for signed in self.criteria.significance_first():
            crit = signed.criterion
            if crit is Criterion.NEW:
                count = len(p_names - o_names)
            elif crit is Criterion.REMOVED:
                count = len(o_names - p_names)
            elif crit is Criterion.CHANGED:
                count = _changed_names(self.installed, chosen)
            elif crit is Criterion.NOT_UP_TO_DATE:
                count = sum(
                    1
                    for name in p_names
                    if PackageId(name, self.newest[name]) not in chosen
                )
            else:
                count = sum(
                    weight
                    for pid, members, weight in self.recommends
                    if pid in chosen and not members & chosen
                )
            values.append(ObjectiveValue(crit, signed.polarity, count))
        return ObjectiveVector(tuple(values))


def _changed_names(before: frozenset[PackageId], after: frozenset[PackageId]) -> int:
    versions_before: dict[str, set[int]] = {}
    for pid in before:
        versions_before.setdefault(pid.name, set()).add(pid.version)
    versions_after: dict[str, set[int]] = {}
    for pid in after:
        versions_after.setdefault(pid.name, set()).add(pid.version)
    names = set(versions_before) | set(versions_after)
    return sum(
        1
        for name in names
        if versions_before.get(name, set()) != versions_after.get(name, set())
    )


def build_problem(
    doc: CudfDocument,
    criteria: CriteriaSeq,
    closure: ClosureResult,
    *,
    _index: DocIndex | None = None,
) -> Problem:
    """Compile a document into solver form, restricted to the closure."""
    index = _index if _index is not None else DocIndex(doc)
    facts = generate(doc, criteria, closure, _index=index)
    members = facts.members
    return Problem(
        candidates=tuple(desc.id for desc in doc if desc.id in facts.units),
        installed=facts.installed,
        requests=tuple(members[sid] for sid in facts.requests),
        depends=tuple((pid, members[sid]) for pid, sid in facts.depends),
        conflicts=tuple((pid, members[sid]) for pid, sid in facts.conflicts),
        recommends=tuple(
            (pid, members[sid], weight) for pid, sid, weight in facts.recommends
        ),
        newest=facts.newest,
        criteria=criteria,
    )


def solve_document(
    doc: CudfDocument,
    criteria: CriteriaSeq,
    *,
    limits: SolveLimits | None = None,
    use_closure: bool = True,
    engine: str = "cdcl",
    _index: DocIndex | None = None,
) -> SolveOutcome:
    """Parse-to-answer convenience: shrink, compile, optimize."""
    index = _index if _index is not None else DocIndex(doc)
    if use_closure:
        shrunk = compute_closure(doc, criteria, _index=index)
    else:
        shrunk = full_scope(doc, _index=index)
    problem = build_problem(doc, criteria, shrunk, _index=index)
    return solve(problem, limits=limits, engine=engine)


def solve(
    problem: Problem,
    *,
    limits: SolveLimits | None = None,
    engine: str = "cdcl",
) -> SolveOutcome:
    limits = limits if limits is not None else SolveLimits()
    if engine == "cdcl":
        return _solve_cdcl(problem, limits)
    if engine == "bnb":
        return _solve_bnb(problem, limits)
    raise ValueError(f"unknown engine: {engine!r}")


# ----------------------------------------------------------------------
# propositional model


def _build_model(
    problem: Problem,
) -> tuple[Solver, dict[PackageId, int], list[tuple[list[int], list[int]]]]:
    """Fresh solver with hard constraints plus per-criterion count literals."""
    solver = Solver()
    installed = problem.installed
    invar: dict[PackageId, int] = {}
    for pid in problem.candidates:
        invar[pid] = solver.new_var(phase=pid in installed)

    for members in problem.requests:
        solver.add_clause([invar[q] for q in sorted(members)])
    for pid, members in problem.depends:
        solver.add_clause([-invar[pid]] + [invar[q] for q in sorted(members)])
    seen_pairs: set[frozenset[PackageId]] = set()
    for pid, members in problem.conflicts:
        for enemy in sorted(members):
            pair = frozenset((pid, enemy))
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            solver.add_clause([-invar[pid], -invar[enemy]])

    by_name: dict[str, list[PackageId]] = {}
    for pid in problem.candidates:
        by_name.setdefault(pid.name, []).append(pid)
    o_names = {pid.name for pid in installed}
    o_versions: dict[str, set[int]] = {}
    for pid in installed:
        o_versions.setdefault(pid.name, set()).add(pid.version)

    def define_or(lits: list[int]) -> int:
        y = solver.new_var()
        solver.add_clause([-y] + lits)
        for lit in lits:
            solver.add_clause([-lit, y])
        return y

    inn_cache: dict[str, int] = {}

    def inn_lit(name: str) -> int:
        """Some version of ``name`` installed."""
        if name not in inn_cache:
            group = by_name[name]
            if len(group) == 1:
                inn_cache[name] = invar[group[0]]
            else:
                inn_cache[name] = define_or([invar[p] for p in group])
        return inn_cache[name]

    changed_cache: dict[str, int | None] = {}

    def changed_lit(name: str) -> int | None:
        """Version set of ``name`` differs from before; None when forced."""
        if name in changed_cache:
            return changed_cache[name]
        group = by_name[name]
        result: int | None
        if name not in o_names:
            result = inn_lit(name)
        elif o_versions[name] - {p.version for p in group}:
            result = None  # an installed version fell out of scope
        else:
            lits = [-invar[p] if p in installed else invar[p] for p in group]
            result = lits[0] if len(lits) == 1 else define_or(lits)
        changed_cache[name] = result
        return result

    def outdated_lit(name: str) -> int | None:
        """``name`` installed but not at its newest version."""
        group = by_name[name]
        top = PackageId(name, problem.newest[name])
        if top not in invar:
            return inn_lit(name)
        if group == [top]:
            return None  # the only choice is the newest version
        inn = inn_lit(name)
        y = solver.new_var()
        solver.add_clause([-y, inn])
        solver.add_clause([-y, -invar[top]])
        solver.add_clause([-inn, invar[top], y])
        return y

    def violation_lit(pid: PackageId, members: frozenset[PackageId]) -> int | None:
        """``pid`` installed with this recommendation unsatisfied."""
        if pid in members:
            return None
        if not members:
            return invar[pid]
        member_lits = [invar[q] for q in sorted(members)]
        y = solver.new_var()
        solver.add_clause([-y, invar[pid]])
        for lit in member_lits:
            solver.add_clause([-y, -lit])
        solver.add_clause([-invar[pid], y] + member_lits)
        return y

    terms: list[tuple[list[int], list[int]]] = []
    for signed in problem.criteria.significance_first():
        lits: list[int] = []
        weights: list[int] = []
        crit = signed.criterion
        if crit is Criterion.NEW:
            for name in by_name:
                if name not in o_names:
                    lits.append(inn_lit(name))
                    weights.append(1)
        elif crit is Criterion.REMOVED:
            for name in by_name:
                if name in o_names:
                    lits.append(-inn_lit(name))
                    weights.append(1)
        elif crit is Criterion.CHANGED:
            for name in by_name:
                lit = changed_lit(name)
                if lit is not None:
                    lits.append(lit)
                    weights.append(1)
        elif crit is Criterion.NOT_UP_TO_DATE:
            for name in by_name:
                lit = outdated_lit(name)
                if lit is not None:
                    lits.append(lit)
                    weights.append(1)
        else:
            for pid, members, weight in problem.recommends:
                lit = violation_lit(pid, members)
                if lit is not None:
                    lits.append(lit)
                    weights.append(weight)
        terms.append((lits, weights))
    return solver, invar, terms


def model_stats(problem: Problem) -> dict[str, int]:
    """Size of the propositional model, without solving anything."""
    solver, _, terms = _build_model(problem)
    return {
        "candidates": len(problem.candidates),
        "variables": solver.num_vars,
        "clauses": solver.num_clauses,
        "count_literals": sum(len(lits) for lits, _ in terms),
    }


def _add_bound(
    solver: Solver,
    lits: list[int],
    weights: list[int],
    polarity: Polarity,
    bound: int,
) -> None:
    if polarity is Polarity.MINUS:
        solver.add_atmost(lits, weights, bound)
    else:  # count >= bound, i.e. at most (total - bound) literals false
        solver.add_atmost([-lit for lit in lits], weights, sum(weights) - bound)


def _model_count(solver: Solver, lits: list[int], weights: list[int]) -> int:
    return sum(w for lit, w in zip(lits, weights) if solver.value(lit) == 1)


def _solve_cdcl(problem: Problem, limits: SolveLimits) -> SolveOutcome:
    deadline = (
        monotonic() + limits.wall_clock if limits.wall_clock is not None else None
    )
    remaining = limits.max_steps
    sig = problem.criteria.significance_first()
    frozen: list[int | None] = [None] * len(sig)
    totals: list[int] = []
    best: frozenset[PackageId] | None = None
    counts: list[int] = []

    def attempt(level: int | None, bound: int | None) -> str:
        nonlocal remaining, best, counts
        solver, invar, terms = _build_model(problem)
        totals[:] = [sum(weights) for _, weights in terms]
        for i, fixed in enumerate(frozen):
            if fixed is not None:
                _add_bound(solver, *terms[i], sig[i].polarity, fixed)
        if level is not None:
            assert bound is not None
            _add_bound(solver, *terms[level], sig[level].polarity, bound)
        budget = remaining if remaining is None or remaining > 0 else 0
        result = solver.solve(max_conflicts=budget, deadline=deadline)
        if remaining is not None:
            remaining -= solver.conflicts
        if result is Result.SAT:
            best = frozenset(p for p, var in invar.items() if solver.assign[var] == 1)
            counts = [_model_count(solver, *term) for term in terms]
            return "sat"
        if result is Result.UNSAT:
            return "unsat"
        return "unknown"

    status = attempt(None, None)
    if status == "unsat":
        return SolveOutcome(Status.UNSATISFIABLE)
    if status == "unknown":
        return SolveOutcome(Status.TIMED_OUT)

    for level, signed in enumerate(sig):
        incumbent = counts[level]
        while True:
            if signed.polarity is Polarity.MINUS:
                if incumbent <= 0:
                    break
                bound = incumbent - 1
            else:
                if incumbent >= totals[level]:
                    break
                bound = incumbent + 1
            status = attempt(level, bound)
            if status == "unknown":
                assert best is not None
                partial = Solution(best, problem.vector_of(best))
                return SolveOutcome(Status.TIMED_OUT, partial)
            if status == "unsat":
                break
            incumbent = counts[level]
        frozen[level] = incumbent

    assert best is not None
    return SolveOutcome(Status.OPTIMAL, Solution(best, problem.vector_of(best)))


# ----------------------------------------------------------------------
# branch and bound


class _OutOfTime(Exception):
    pass


def _solve_bnb(problem: Problem, limits: SolveLimits) -> SolveOutcome:
    candidates = problem.candidates
    if len(candidates) > _BNB_LIMIT:
        raise ScopeTooLarge(
            f"branch and bound handles at most {_BNB_LIMIT} candidates,"
            f" got {len(candidates)}"
        )
    deadline = (
        monotonic() + limits.wall_clock if limits.wall_clock is not None else None
    )
    sig = problem.criteria.significance_first()
    installed = problem.installed
    o_names = {p.name for p in installed}
    by_name: dict[str, list[PackageId]] = {}
    for pid in candidates:
        by_name.setdefault(pid.name, []).append(pid)
    new_names = [name for name in by_name if name not in o_names]
    old_names = [name for name in by_name if name in o_names]
    removed_constant = len(o_names - set(by_name))
    candidate_set = set(candidates)
    changed_constant = {p.name for p in installed if p not in candidate_set}
    top_of: dict[str, PackageId | None] = {}
    for name in by_name:
        top = PackageId(name, problem.newest[name])
        top_of[name] = top if top in set(by_name[name]) else None

    chosen: set[PackageId] = set()
    out: set[PackageId] = set()
    best_key: tuple[int, ...] | None = None
    best_set: frozenset[PackageId] | None = None
    nodes = 0

    def hard_violated() -> bool:
        for pid, enemies in problem.conflicts:
            if pid in chosen and enemies & chosen:
                return True
        for members in problem.requests:
            if members <= out:
                return True
        for pid, members in problem.depends:
            if pid in chosen and members <= out:
                return True
        return False

    def optimistic_key() -> tuple[int, ...]:
        parts: list[int] = []
        for signed in sig:
            crit = signed.criterion
            minus = signed.polarity is Polarity.MINUS
            if crit is Criterion.NEW:
                if minus:
                    value = sum(
                        1
                        for name in new_names
                        if any(p in chosen for p in by_name[name])
                    )
                else:
                    value = -sum(
                        1
                        for name in new_names
                        if any(p not in out for p in by_name[name])
                    )
            elif crit is Criterion.REMOVED:
                if minus:
                    value = removed_constant + sum(
                        1
                        for name in old_names
                        if all(p in out for p in by_name[name])
                    )
                else:
                    value = -(
                        removed_constant
                        + sum(
                            1
                            for name in old_names
                            if not any(p in chosen for p in by_name[name])
                        )
                    )
            elif crit is Criterion.CHANGED:
                names = set(changed_constant)
                for name, group in by_name.items():
                    if name in names:
                        continue
                    for p in group:
                        decided_diff = (p in chosen and p not in installed) or (
                            p in out and p in installed
                        )
                        if decided_diff or (
                            not minus and p not in chosen and p not in out
                        ):
                            names.add(name)
                            break
                value = len(names) if minus else -len(names)
            elif crit is Criterion.NOT_UP_TO_DATE:
                value = 0
                for name, group in by_name.items():
                    top = top_of[name]
                    if minus:
                        if (top is None or top in out) and any(
                            p in chosen for p in group
                        ):
                            value += 1
                    else:
                        if (top is None or top not in chosen) and any(
                            p not in out for p in group
                        ):
                            value -= 1
            else:
                value = 0
                for pid, members, weight in problem.recommends:
                    if minus:
                        if pid in chosen and members <= out:
                            value += weight
                    else:
                        if pid not in out and not members & chosen:
                            value -= weight
            parts.append(value)
        return tuple(parts)

    def search(i: int) -> None:
        nonlocal nodes, best_key, best_set
        nodes += 1
        if limits.max_steps is not None and nodes > limits.max_steps:
            raise _OutOfTime
        if deadline is not None and nodes % 256 == 0 and monotonic() > deadline:
            raise _OutOfTime
        if hard_violated():
            return
        if best_key is not None and optimistic_key() >= best_key:
            return
        if i == len(candidates):
            selection = frozenset(chosen)
            key = problem.vector_of(selection).key()
            if best_key is None or key < best_key:
                best_key = key
                best_set = selection
            return
        pid = candidates[i]
        for put_in in (True, False) if pid in installed else (False, True):
            bucket = chosen if put_in else out
            bucket.add(pid)
            search(i + 1)
            bucket.remove(pid)

    try:
        search(0)
    except _OutOfTime:
        if best_set is None:
            return SolveOutcome(Status.TIMED_OUT)
        return SolveOutcome(
            Status.TIMED_OUT, Solution(best_set, problem.vector_of(best_set))
        )
    if best_set is None:
        return SolveOutcome(Status.UNSATISFIABLE)
    return SolveOutcome(Status.OPTIMAL, Solution(best_set, problem.vector_of(best_set)))


# ----------------------------------------------------------------------
# exhaustive oracle


def brute_force(
    doc: CudfDocument,
    criteria: CriteriaSeq,
    scope: tuple[PackageId, ...] | None = None,
    *,
    _index: DocIndex | None = None,
) -> Solution | None:
    """Try every subset of ``scope`` (default: the whole universe).

    Returns the best valid selection, preferring smaller then
    lexicographically smaller witnesses among ties, or None when no
    subset is valid.  Refuses scopes past 20 packages.
    """
    index = _index if _index is not None else DocIndex(doc)
    pool = tuple(scope) if scope is not None else tuple(p.id for p in doc)
    if len(pool) > 20:
        raise ScopeTooLarge(f"cannot enumerate 2**{len(pool)} selections")
    best_rank: tuple | None = None
    best: Solution | None = None
    for mask in range(1 << len(pool)):
        selection = frozenset(pid for i, pid in enumerate(pool) if mask >> i & 1)
        if not validate_solution(doc, selection, _index=index).ok:
            continue
        vector = evaluate(doc, selection, criteria)
        rank = (vector.key(), len(selection), tuple(sorted(selection)))
        if best_rank is None or rank < best_rank:
            best_rank = rank
            best = Solution(selection, vector)
    return best
