"""What documents mean: matching, virtual packages, objectives, validity.

This module is deliberately independent of the preprocessing and
solving machinery so it can act as the referee for both: it decides
which packages satisfy a constraint, measures an installation against a
criteria sequence, and checks whether a proposed installation is
actually a solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .criteria import CriteriaSeq, Criterion, Polarity
from .errors import UnknownName
from .model import (
    Clause,
    Constraint,
    CudfDocument,
    PackageDesc,
    PackageId,
    RelOp,
    VersionBound,
    effective_request,
)


@dataclass(frozen=True)
class VersionSpec:
    """A provided version: an exact one, or every version at once."""

    version: int | None = None

    @property
    def is_all(self) -> bool:
        return self.version is None


ALL_VERSIONS = VersionSpec(None)


@dataclass(frozen=True)
class ProvideSet:
    """Everything a package (or group of packages) makes available."""

    entries: Mapping[str, frozenset[VersionSpec]]

    def names(self) -> frozenset[str]:
        return frozenset(self.entries)

    def has_all(self, name: str) -> bool:
        return ALL_VERSIONS in self.entries.get(name, frozenset())

    def exact_versions(self, name: str) -> frozenset[int]:
        return frozenset(
            s.version for s in self.entries.get(name, frozenset()) if s.version is not None
        )

    def matches(self, constraint: Constraint) -> bool:
        specs = self.entries.get(constraint.name)
        if not specs:
            return False
        if constraint.bound is None:
            return True
        if ALL_VERSIONS in specs and bound_satisfiable(constraint.bound):
            return True
        bound = constraint.bound
        return any(
            s.version is not None and bound.op.holds(s.version, bound.value)
            for s in specs
        )


def bound_satisfiable(bound: VersionBound | None) -> bool:
    """Whether any version at all (over positive integers) meets ``bound``."""
    if bound is None:
        return True
    if bound.op is RelOp.LT:
        return bound.value >= 2
    if bound.op is RelOp.LE:
        return bound.value >= 1
    if bound.op is RelOp.EQ:
        return bound.value >= 1
    return True  # NEQ, GT, GE always have a witness


def constraint_matches(constraint: Constraint, name: str, version: int) -> bool:
    """Whether the real package pair (name, version) meets ``constraint``."""
    if constraint.name != name:
        return False
    if constraint.bound is None:
        return True
    return constraint.bound.op.holds(version, constraint.bound.value)


def _merge_entry(
    entries: dict[str, set[VersionSpec]], name: str, spec: VersionSpec
) -> None:
    specs = entries.setdefault(name, set())
    if ALL_VERSIONS in specs:
        return
    if spec.is_all:
        specs.clear()
    specs.add(spec)


def provide(desc: PackageDesc) -> ProvideSet:
    """The versions made available by installing ``desc``."""
    entries: dict[str, set[VersionSpec]] = {desc.name: {VersionSpec(desc.version)}}
    for clause in desc.provides.clauses:
        atom = clause.atoms[0]
        spec = ALL_VERSIONS if atom.bound is None else VersionSpec(atom.bound.value)
        _merge_entry(entries, atom.name, spec)
    return ProvideSet({n: frozenset(s) for n, s in entries.items()})


def provide_union(descs: Iterable[PackageDesc]) -> ProvideSet:
    """The combined :func:`provide` of several packages."""
    entries: dict[str, set[VersionSpec]] = {}
    for desc in descs:
        for name, specs in provide(desc).entries.items():
            for spec in specs:
                _merge_entry(entries, name, spec)
    return ProvideSet({n: frozenset(s) for n, s in entries.items()})


def clause_providers(
    clause: Clause, candidates: Iterable[PackageDesc]
) -> set[PackageId]:
    """The candidates whose provide set meets any atom of ``clause``."""
    out: set[PackageId] = set()
    for desc in candidates:
        prov = provide(desc)
        if any(prov.matches(atom) for atom in clause.atoms):
            out.add(desc.id)
    return out


class DocIndex:
    """Precomputed lookup structures for one document.

    Built once and shared by the preprocessing, fact generation and
    validation paths; the public functions in this module accept plain
    documents and build one on the fly.
    """

    def __init__(self, doc: CudfDocument) -> None:
        self.doc = doc
        self.by_id: dict[PackageId, PackageDesc] = {p.id: p for p in doc.packages}
        self.installed: frozenset[PackageId] = doc.installed_ids()
        self.umax: dict[str, int] = {}
        for desc in doc.packages:
            if self.umax.get(desc.name, 0) < desc.version:
                self.umax[desc.name] = desc.version
        # name -> exact provided versions / "all versions" flag, per package
        self.exact: dict[PackageId, dict[str, frozenset[int]]] = {}
        self.all_names: dict[PackageId, frozenset[str]] = {}
        # provided name -> packages touching it, in document order
        self.touching: dict[str, list[PackageId]] = {}
        for desc in doc.packages:
            prov = provide(desc)
            self.exact[desc.id] = {
                n: prov.exact_versions(n) for n in prov.entries
            }
            self.all_names[desc.id] = frozenset(
                n for n in prov.entries if prov.has_all(n)
            )
            for name in prov.entries:
                self.touching.setdefault(name, []).append(desc.id)
        self.effective = effective_request(doc)

    def atom_matches(self, atom: Constraint, pid: PackageId) -> bool:
        exact = self.exact[pid].get(atom.name)
        if exact is None and atom.name not in self.all_names[pid]:
            return False
        if atom.bound is None:
            return True
        if atom.name in self.all_names[pid] and bound_satisfiable(atom.bound):
            return True
        bound = atom.bound
        return exact is not None and any(
            bound.op.holds(v, bound.value) for v in exact
        )

    def clause_matches(self, clause: Clause, pid: PackageId) -> bool:
        return any(self.atom_matches(atom, pid) for atom in clause.atoms)

    def providers(
        self, clause: Clause, allowed: frozenset[PackageId] | None = None
    ) -> list[PackageId]:
        """Providers of ``clause`` in document order, optionally filtered."""
        seen: set[PackageId] = set()
        for atom in clause.atoms:
            for pid in self.touching.get(atom.name, ()):
                if pid in seen or (allowed is not None and pid not in allowed):
                    continue
                if self.atom_matches(atom, pid):
                    seen.add(pid)
        return sorted(seen)

    def provided_max(self, pids: Iterable[PackageId], name: str) -> float | None:
        """Highest version of ``name`` provided by ``pids`` (inf for 'all')."""
        best: float | None = None
        for pid in pids:
            if name in self.all_names[pid]:
                return math.inf
            for v in self.exact[pid].get(name, ()):
                if best is None or v > best:
                    best = v
        return best


@dataclass(frozen=True)
class OptimizationSets:
    """The name/clause sets the criteria count.

    ``unsat_recommends`` holds (name, version, clause index) triples,
    indices starting at 1 in source order.
    """

    new: frozenset[str]
    removed: frozenset[str]
    changed: frozenset[str]
    not_up_to_date: frozenset[str]
    unsat_recommends: frozenset[tuple[str, int, int]]


def compute_sets(
    doc: CudfDocument, installed: Iterable[PackageId]
) -> OptimizationSets:
    """Measure the follow-up installation against the current one."""
    chosen = frozenset(installed)
    by_id = {p.id: p for p in doc.packages}
    for pid in chosen:
        if pid not in by_id:
            raise UnknownName(f"{pid} is not in the document")

    p_versions: dict[str, set[int]] = {}
    for pid in chosen:
        p_versions.setdefault(pid.name, set()).add(pid.version)
    o_versions: dict[str, set[int]] = {}
    for desc in doc.packages:
        if desc.installed:
            o_versions.setdefault(desc.name, set()).add(desc.version)
    umax: dict[str, int] = {}
    for desc in doc.packages:
        if umax.get(desc.name, 0) < desc.version:
            umax[desc.name] = desc.version

    new = frozenset(n for n in p_versions if n not in o_versions)
    removed = frozenset(n for n in o_versions if n not in p_versions)
    changed = frozenset(
        n
        for n in set(p_versions) | set(o_versions)
        if p_versions.get(n, set()) != o_versions.get(n, set())
    )
    not_up_to_date = frozenset(
        n for n, versions in p_versions.items() if umax[n] not in versions
    )

    prov = provide_union(by_id[pid] for pid in chosen)
    unsat: set[tuple[str, int, int]] = set()
    for pid in chosen:
        desc = by_id[pid]
        for i, clause in enumerate(desc.recommends.clauses, 1):
            if not any(prov.matches(atom) for atom in clause.atoms):
                unsat.add((pid.name, pid.version, i))

    return OptimizationSets(new, removed, changed, not_up_to_date, frozenset(unsat))


@dataclass(frozen=True)
class ObjectiveValue:
    criterion: Criterion
    polarity: Polarity
    count: int

    def __str__(self) -> str:
        return f"{self.polarity.value}{self.criterion.cli_name}={self.count}"


@dataclass(frozen=True)
class ObjectiveVector:
    """Criterion counts, most significant first."""

    values: tuple[ObjectiveValue, ...]

    def key(self) -> tuple[int, ...]:
        """Comparison key: lexicographically smaller is better."""
        return tuple(
            v.count if v.polarity is Polarity.MINUS else -v.count for v in self.values
        )

    def better_than(self, other: "ObjectiveVector") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.values) if self.values else "(no criteria)"


def evaluate(
    doc: CudfDocument, installed: Iterable[PackageId], criteria: CriteriaSeq
) -> ObjectiveVector:
    """The objective vector of an installation under ``criteria``."""
    sets = compute_sets(doc, installed)
    counts = {
        Criterion.NEW: len(sets.new),
        Criterion.REMOVED: len(sets.removed),
        Criterion.CHANGED: len(sets.changed),
        Criterion.NOT_UP_TO_DATE: len(sets.not_up_to_date),
        Criterion.UNSAT_RECOMMENDS: len(sets.unsat_recommends),
    }
    return ObjectiveVector(
        tuple(
            ObjectiveValue(sc.criterion, sc.polarity, counts[sc.criterion])
            for sc in criteria.significance_first()
        )
    )


@dataclass(frozen=True)
class UnsatisfiedRequest:
    which: str
    clause: Clause

    def __str__(self) -> str:
        return f"unsatisfied request: {self.which} '{self.clause}'"


@dataclass(frozen=True)
class UnsatisfiedDependency:
    package: PackageId
    clause: Clause

    def __str__(self) -> str:
        return f"unsatisfied dependency: {self.package} needs '{self.clause}'"


@dataclass(frozen=True)
class ConflictViolated:
    package: PackageId
    other: PackageId

    def __str__(self) -> str:
        return f"conflict violated: {self.package} conflicts with {self.other}"


@dataclass(frozen=True)
class OutPackageInstalled:
    package: PackageId
    reason: str

    def __str__(self) -> str:
        return f"forbidden package installed: {self.package} {self.reason}"


@dataclass(frozen=True)
class UpgradeMultiVersion:
    name: str

    def __str__(self) -> str:
        return f"upgrade violated: several versions of {self.name} would be available"


Violation = Union[
    UnsatisfiedRequest,
    UnsatisfiedDependency,
    ConflictViolated,
    OutPackageInstalled,
    UpgradeMultiVersion,
]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


def _mentioned_names(clause: Clause) -> list[str]:
    """Names an upgrade clause could target at all, in clause order."""
    names: list[str] = []
    for atom in clause.atoms:
        if bound_satisfiable(atom.bound) and atom.name not in names:
            names.append(atom.name)
    return names


def validate_solution(
    doc: CudfDocument,
    installed: Iterable[PackageId],
    *,
    _index: DocIndex | None = None,
) -> ValidationReport:
    """Check a proposed installation against the document.

    Verifies the request (install and upgrade clauses served, remove
    targets gone), dependencies and conflicts of everything installed,
    and the upgrade rules: no version below one currently provided, and
    one available version at most per upgraded name.
    """
    index = _index if _index is not None else DocIndex(doc)
    chosen = frozenset(installed)
    for pid in chosen:
        if pid not in index.by_id:
            raise UnknownName(f"{pid} is not in the document")
    ordered = sorted(chosen)
    violations: list[Violation] = []

    def satisfied(clause: Clause) -> bool:
        return any(index.atom_matches(atom, pid) for atom in clause.atoms for pid in ordered)

    for clause in index.effective.install.clauses:
        if not satisfied(clause):
            violations.append(UnsatisfiedRequest("install", clause))
    for clause in index.effective.upgrade.clauses:
        if not satisfied(clause):
            violations.append(UnsatisfiedRequest("upgrade", clause))

    for clause in index.effective.remove.clauses:
        for pid in ordered:
            if index.clause_matches(clause, pid):
                violations.append(
                    OutPackageInstalled(pid, f"matches the remove request '{clause}'")
                )

    for pid in ordered:
        desc = index.by_id[pid]
        for clause in desc.depends.clauses:
            if not satisfied(clause):
                violations.append(UnsatisfiedDependency(pid, clause))

    for pid in ordered:
        desc = index.by_id[pid]
        for clause in desc.conflicts.clauses:
            for atom in clause.atoms:
                for other in ordered:
                    if other != pid and index.atom_matches(atom, other):
                        violations.append(ConflictViolated(pid, other))

    for clause in index.effective.upgrade.clauses:
        mentioned = _mentioned_names(clause)
        flagged: set[str] = set()
        pairs: set[tuple[str, int]] = set()
        for name in mentioned:
            omax = index.provided_max(index.installed, name)
            for pid in ordered:
                if name in index.all_names[pid]:
                    flagged.add(name)
                    if omax is not None and omax > 1:
                        violations.append(
                            OutPackageInstalled(
                                pid, f"downgrades {name} relative to what is installed"
                            )
                        )
                    continue
                versions = index.exact[pid].get(name, frozenset())
                pairs.update((name, v) for v in versions)
                if versions and omax is not None and min(versions) < omax:
                    violations.append(
                        OutPackageInstalled(
                            pid, f"downgrades {name} relative to what is installed"
                        )
                    )
        per_name: dict[str, int] = {}
        for name, _ in pairs:
            per_name[name] = per_name.get(name, 0) + 1
        flagged.update(n for n, count in per_name.items() if count > 1)
        if not flagged and len(pairs) > 1:
            # several names of one disjunctive upgrade clause served at once
            flagged.add(min(n for n, _ in pairs))
        violations.extend(UpgradeMultiVersion(n) for n in sorted(flagged))

    # deduplicate while keeping first-reported order
    unique: list[Violation] = []
    seen: set[Violation] = set()
    for v in violations:
        if v not in seen:
            seen.add(v)
            unique.append(v)
    return ValidationReport(ok=not unique, violations=tuple(unique))
