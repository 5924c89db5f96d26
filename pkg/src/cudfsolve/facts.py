"""Compiling a preprocessed document into solver facts.

The output is a flat set of ground facts over interned package sets:
``depends(name, version, s3)`` says the package needs a member of set
``s3`` installed, ``satisfies(name, version, s3)`` enumerates that
set, and so on.  The same representation feeds the bundled solver and
can be rendered as text for external logic-programming tools.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .closure import ClosureResult
from .criteria import CriteriaSeq, Criterion, Polarity
from .errors import InfeasibleInput
from .model import Clause, CudfDocument, PackageId
from .semantics import DocIndex, bound_satisfiable


@dataclass(frozen=True, order=True)
class SetId:
    """Opaque handle for an interned package set."""

    ordinal: int

    @property
    def token(self) -> str:
        return f"s{self.ordinal}"

    def __str__(self) -> str:
        return self.token


class SetInterner:
    """Assigns one stable token per distinct package set."""

    def __init__(self) -> None:
        self._ids: dict[frozenset[PackageId], SetId] = {}
        self.members: dict[SetId, frozenset[PackageId]] = {}

    def intern(self, members: Iterable[PackageId]) -> SetId:
        key = frozenset(members)
        found = self._ids.get(key)
        if found is not None:
            return found
        sid = SetId(len(self._ids) + 1)
        self._ids[key] = sid
        self.members[sid] = key
        return sid


@dataclass(frozen=True)
class FactSet:
    """Everything the solver needs to know about one problem."""

    units: frozenset[PackageId]
    installed: frozenset[PackageId]
    newest: Mapping[str, int]
    depends: tuple[tuple[PackageId, SetId], ...]
    recommends: tuple[tuple[PackageId, SetId, int], ...]
    conflicts: tuple[tuple[PackageId, SetId], ...]
    requests: tuple[SetId, ...]
    satisfies: tuple[tuple[PackageId, SetId], ...]
    criteria: tuple[tuple[str, int], ...]
    members: Mapping[SetId, frozenset[PackageId]]


def _mentioned_atoms(clause: Clause):
    return [a for a in clause.atoms if bound_satisfiable(a.bound)]


def _matching_pairs(
    index: DocIndex, clause: Clause, pid: PackageId
) -> frozenset[tuple[str, int]]:
    """The provided (name, version) pairs an upgrade clause accepts."""
    pairs: set[tuple[str, int]] = set()
    for atom in _mentioned_atoms(clause):
        assert atom.name not in index.all_names[pid], (
            "open-ended provides of an upgraded name must be excluded upstream"
        )
        for version in index.exact[pid].get(atom.name, ()):
            if atom.bound is None or atom.bound.op.holds(version, atom.bound.value):
                pairs.add((atom.name, version))
    return frozenset(pairs)


def generate(
    doc: CudfDocument,
    criteria: CriteriaSeq,
    closure: ClosureResult,
    *,
    _index: DocIndex | None = None,
) -> FactSet:
    """Turn a document and its preprocessing result into facts.

    Only closure members are described, except that the currently
    installed packages are always listed in full so the objective can
    count what disappears.
    """
    if not closure.feasible:
        raise InfeasibleInput("the request cannot be satisfied")
    index = _index if _index is not None else DocIndex(doc)
    scope = closure.closure
    ordered = [desc for desc in doc.packages if desc.id in scope]
    interner = SetInterner()
    want_recommends = criteria.polarity_of(Criterion.UNSAT_RECOMMENDS) is not None

    depends: dict[tuple[PackageId, SetId], None] = {}
    for desc in ordered:
        for clause in desc.depends.clauses:
            sid = interner.intern(index.providers(clause, scope))
            depends.setdefault((desc.id, sid))

    recommends: dict[tuple[PackageId, SetId, int], None] = {}
    if want_recommends:
        for desc in ordered:
            groups: dict[SetId, int] = {}
            for clause in desc.recommends.clauses:
                sid = interner.intern(index.providers(clause, scope))
                groups[sid] = groups.get(sid, 0) + 1
            for sid, count in groups.items():
                recommends.setdefault((desc.id, sid, count))

    conflicts: dict[tuple[PackageId, SetId], None] = {}
    for desc in ordered:
        atoms = [a for clause in desc.conflicts.clauses for a in clause.atoms]
        if not atoms:
            continue
        enemies: set[PackageId] = set()
        for atom in atoms:
            enemies.update(
                pid
                for pid in index.touching.get(atom.name, ())
                if pid != desc.id and pid in scope and index.atom_matches(atom, pid)
            )
        if enemies:
            conflicts.setdefault((desc.id, interner.intern(enemies)))

    for clause in index.effective.upgrade.clauses:
        matching = {
            desc.id: pairs
            for desc in ordered
            if (pairs := _matching_pairs(index, clause, desc.id))
        }
        for desc in ordered:
            mine = matching.get(desc.id)
            if not mine:
                continue
            rivals = {pid for pid, pairs in matching.items() if pairs != mine}
            if rivals:
                conflicts.setdefault((desc.id, interner.intern(rivals)))

    requests: dict[SetId, None] = {}
    for clause in index.effective.install.clauses + index.effective.upgrade.clauses:
        requests.setdefault(interner.intern(index.providers(clause, scope)))

    referenced = sorted(
        {sid for _, sid in depends}
        | {sid for _, sid, _ in recommends}
        | {sid for _, sid in conflicts}
        | set(requests)
    )
    satisfies = tuple(
        (pid, sid) for sid in referenced for pid in sorted(interner.members[sid])
    )

    newest = {desc.name: index.umax[desc.name] for desc in ordered}
    criteria_facts = tuple(
        (
            item.criterion.fact_name,
            position if item.polarity is Polarity.PLUS else -position,
        )
        for position, item in enumerate(criteria.items, 1)
    )

    return FactSet(
        units=frozenset(scope),
        installed=index.installed,
        newest=newest,
        depends=tuple(depends),
        recommends=tuple(recommends),
        conflicts=tuple(conflicts),
        requests=tuple(requests),
        satisfies=satisfies,
        criteria=criteria_facts,
        members=dict(interner.members),
    )


_BARE_NAME = re.compile(r"[a-z][a-z0-9_]*")


def _term(name: str) -> str:
    """Render a package name as a logic-program constant."""
    if _BARE_NAME.fullmatch(name):
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def render_facts(facts: FactSet) -> str:
    """Render a fact set as text, one fact per line, stable order."""
    lines: list[str] = []
    for pid in sorted(facts.units):
        lines.append(f"unit({_term(pid.name)},{pid.version}).")
    for pid in sorted(facts.installed):
        lines.append(f"installed({_term(pid.name)},{pid.version}).")
    for name in sorted(facts.newest):
        lines.append(f"newestversion({_term(name)},{facts.newest[name]}).")
    for pid, sid in sorted(facts.depends):
        lines.append(f"depends({_term(pid.name)},{pid.version},{sid}).")
    for pid, sid, count in sorted(facts.recommends):
        lines.append(f"recommends({_term(pid.name)},{pid.version},{sid},{count}).")
    for pid, sid in sorted(facts.conflicts):
        lines.append(f"conflict({_term(pid.name)},{pid.version},{sid}).")
    for sid in sorted(facts.requests):
        lines.append(f"request({sid}).")
    for pid, sid in sorted(facts.satisfies):
        lines.append(f"satisfies({_term(pid.name)},{pid.version},{sid}).")
    for constant, position in facts.criteria:
        lines.append(f"criterion({constant},{position}).")
    return "\n".join(lines) + "\n" if lines else ""
