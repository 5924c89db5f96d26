"""Optimization criteria and their command-line syntax.

A criteria sequence ranks counting measures over the outcome of an
upgrade: how many names were removed, changed, left behind their newest
version, and so on.  Sequences are stored least-significant first, the
order in which positions are numbered in the emitted facts; the solver
and the objective vector work most-significant first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import BadCriteria


class Criterion(enum.Enum):
    """The measures a criteria sequence can rank."""

    NEW = "new"
    REMOVED = "removed"
    CHANGED = "changed"
    NOT_UP_TO_DATE = "notuptodate"
    UNSAT_RECOMMENDS = "unsat_recommends"

    @property
    def cli_name(self) -> str:
        return self.value

    @property
    def fact_name(self) -> str:
        return _FACT_NAMES[self]


_FACT_NAMES = {
    Criterion.NEW: "newpackage",
    Criterion.REMOVED: "remove",
    Criterion.CHANGED: "change",
    Criterion.NOT_UP_TO_DATE: "uptodate",
    Criterion.UNSAT_RECOMMENDS: "recommend",
}

_BY_CLI_NAME = {c.value: c for c in Criterion}


class Polarity(enum.Enum):
    """Whether a criterion's count is minimized or maximized."""

    MINUS = "-"
    PLUS = "+"


@dataclass(frozen=True)
class SignedCriterion:
    criterion: Criterion
    polarity: Polarity

    def __str__(self) -> str:
        return f"{self.polarity.value}{self.criterion.cli_name}"


@dataclass(frozen=True)
class CriteriaSeq:
    """An ordered criteria sequence, least significant first.

    The same criterion may appear at most once regardless of sign.
    """

    items: tuple[SignedCriterion, ...]

    def __post_init__(self) -> None:
        seen: set[Criterion] = set()
        for item in self.items:
            if item.criterion in seen:
                raise BadCriteria(f"criterion repeated: {item.criterion.cli_name}")
            seen.add(item.criterion)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def significance_first(self) -> tuple[SignedCriterion, ...]:
        return tuple(reversed(self.items))

    def has(self, criterion: Criterion, polarity: Polarity) -> bool:
        return any(
            i.criterion is criterion and i.polarity is polarity for i in self.items
        )

    def polarity_of(self, criterion: Criterion) -> Polarity | None:
        for item in self.items:
            if item.criterion is criterion:
                return item.polarity
        return None

    def __str__(self) -> str:
        return ",".join(str(i) for i in self.significance_first())


def _seq(*items: tuple[Criterion, Polarity]) -> CriteriaSeq:
    return CriteriaSeq(tuple(SignedCriterion(c, p) for c, p in items))


#: Touch as little as possible: removals outrank other changes.
PARANOID = _seq(
    (Criterion.CHANGED, Polarity.MINUS),
    (Criterion.REMOVED, Polarity.MINUS),
)

#: Chase the newest versions while still avoiding removals first.
TRENDY = _seq(
    (Criterion.NEW, Polarity.MINUS),
    (Criterion.UNSAT_RECOMMENDS, Polarity.MINUS),
    (Criterion.NOT_UP_TO_DATE, Polarity.MINUS),
    (Criterion.REMOVED, Polarity.MINUS),
)

_PRESETS = {"paranoid": PARANOID, "trendy": TRENDY}


def parse_criteria(text: str) -> CriteriaSeq:
    """Parse a criteria string.

    Accepts the preset names ``paranoid`` and ``trendy``, or a
    comma-separated list of signed criterion names ordered most
    significant first, e.g. ``-removed,-changed``.
    """
    text = text.strip()
    if text in _PRESETS:
        return _PRESETS[text]
    if not text:
        return CriteriaSeq(())
    items: list[SignedCriterion] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise BadCriteria(f"empty entry in criteria string {text!r}")
        sign, name = chunk[0], chunk[1:]
        if sign not in ("-", "+"):
            raise BadCriteria(f"criterion {chunk!r} must start with '+' or '-'")
        criterion = _BY_CLI_NAME.get(name)
        if criterion is None:
            raise BadCriteria(f"unknown criterion {name!r}")
        polarity = Polarity.MINUS if sign == "-" else Polarity.PLUS
        items.append(SignedCriterion(criterion, polarity))
    return CriteriaSeq(tuple(reversed(items)))
