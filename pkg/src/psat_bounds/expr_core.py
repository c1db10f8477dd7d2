"""Monotone DNF expressions: parsing, minimization, evaluation and duality.

An expression over events ``1..N`` is a disjunction of clauses, each clause
a conjunction of events.  Only inclusion-minimal clauses are stored, so a
clause is also a *minimal strut*.  The dual expression's clauses are the
minimal transversals of the clause family, i.e. the *minimal cuts*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Iterator

from .errors import ParseError

Clause = frozenset


def _canonical(clauses: Iterable[AbstractSet[int]]) -> tuple[frozenset[int], ...]:
    return tuple(sorted((frozenset(c) for c in clauses), key=lambda c: (sorted(c), len(c))))


def minimize_clauses(clauses: Iterable[AbstractSet[int]]) -> tuple[frozenset[int], ...]:
    """Keep only the inclusion-minimal members of ``clauses``, deduplicated."""
    unique = {frozenset(c) for c in clauses}
    # Visiting by size means each candidate only has to be checked against
    # survivors that are not larger than itself.
    kept: list[frozenset[int]] = []
    for c in sorted(unique, key=len):
        if not any(k <= c for k in kept):
            kept.append(c)
    return _canonical(kept)


@dataclass(frozen=True)
class MonotoneExpression:
    """Minimal-clause DNF over ``n_events`` independent events.

    Instances are immutable.  ``clauses`` is held in canonical order
    (lexicographic on the sorted members) so equality is structural.
    """

    n_events: int
    clauses: tuple[frozenset[int], ...]
    _masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, n_events: int, clauses: Iterable[AbstractSet[int]]):
        clauses = [frozenset(int(e) for e in c) for c in clauses]
        if not clauses:
            raise ParseError("expression needs at least one clause")
        for c in clauses:
            if not c:
                raise ParseError("empty clause")
            if min(c) < 1:
                raise ParseError(f"event index below 1 in clause {sorted(c)}")
        top = max(max(c) for c in clauses)
        if n_events < top:
            raise ParseError(f"N={n_events} but index {top} is referenced")
        minimal = minimize_clauses(clauses)
        object.__setattr__(self, "n_events", int(n_events))
        object.__setattr__(self, "clauses", minimal)
        object.__setattr__(
            self, "_masks", tuple(sum(1 << (e - 1) for e in c) for c in minimal)
        )

    @classmethod
    def from_clauses(cls, clauses: Iterable[AbstractSet[int]], n_events: int | None = None):
        clauses = [frozenset(c) for c in clauses]
        if n_events is None:
            n_events = max((max(c) for c in clauses if c), default=0)
        return cls(n_events, clauses)

    @property
    def masks(self) -> tuple[int, ...]:
        """Clause bitmasks with bit ``i-1`` standing for event ``i``."""
        return self._masks

    @property
    def support(self) -> frozenset[int]:
        return frozenset().union(*self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.clauses)

    def __str__(self) -> str:
        return format_expression(self)


def config_mask(config: AbstractSet[int] | int) -> int:
    if isinstance(config, int):
        return config
    return sum(1 << (e - 1) for e in config)


def evaluate(expr: MonotoneExpression, config: AbstractSet[int] | int) -> bool:
    """True iff some clause is contained in the set of true events.

    ``config`` is either a set of event indices or a bitmask.
    """
    m = config_mask(config)
    return any(c & m == c for c in expr.masks)


def complement(expr: MonotoneExpression, config: AbstractSet[int]) -> frozenset[int]:
    return frozenset(range(1, expr.n_events + 1)) - frozenset(config)


def minimal_transversals(clauses: Iterable[AbstractSet[int]]) -> tuple[frozenset[int], ...]:
    """Berge's incremental algorithm: fold in one clause at a time."""
    transversals: list[frozenset[int]] = [frozenset()]
    for clause in _canonical(clauses):
        grown = []
        for t in transversals:
            if t & clause:
                grown.append(t)
            else:
                grown.extend(t | {e} for e in sorted(clause))
        transversals = list(minimize_clauses(grown))
    return _canonical(transversals)


def dual(expr: MonotoneExpression) -> MonotoneExpression:
    """Expression whose clauses are the minimal cuts of ``expr``."""
    return MonotoneExpression(expr.n_events, minimal_transversals(expr.clauses))


def parse_expression(text: str) -> MonotoneExpression:
    """Parse the line-based expression format.

    An optional first line ``N=<int>`` fixes the number of events; ``#``
    starts a comment; every other nonblank line is one clause.
    """
    declared = None
    clauses = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.replace(" ", "").upper().startswith("N="):
            if seen_content:
                raise ParseError(f"line {lineno}: N= must precede the clauses")
            try:
                declared = int(line.split("=", 1)[1])
            except ValueError:
                raise ParseError(f"line {lineno}: bad event count {line!r}") from None
            if declared < 1:
                raise ParseError(f"line {lineno}: N must be positive")
            seen_content = True
            continue
        seen_content = True
        try:
            events = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {line!r}") from None
        if any(e < 1 for e in events):
            raise ParseError(f"line {lineno}: event indices start at 1")
        clauses.append(frozenset(events))
    if not clauses:
        raise ParseError("no clauses found")
    top = max(max(c) for c in clauses)
    n = top if declared is None else declared
    return MonotoneExpression(n, clauses)


def format_expression(expr: MonotoneExpression) -> str:
    lines = [f"N={expr.n_events}"]
    lines += [" ".join(str(e) for e in sorted(c)) for c in expr.clauses]
    return "\n".join(lines) + "\n"


def series(n: int) -> MonotoneExpression:
    """All ``n`` events required (a chain)."""
    return MonotoneExpression(n, [range(1, n + 1)])


def parallel(n: int) -> MonotoneExpression:
    """Any single event suffices."""
    return MonotoneExpression(n, [{i} for i in range(1, n + 1)])


EXAMPLE_TEXT = "N=7\n1 2 3\n1 4 5\n6 7\n"


def example_expression() -> MonotoneExpression:
    """The seven-event, three-strut toy expression used throughout the tests."""
    return parse_expression(EXAMPLE_TEXT)
