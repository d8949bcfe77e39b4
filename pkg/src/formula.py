"""
Canonical data model for 2SAT formulas.

Literals are integer codes in [1, 2n]: codes 1..n are x_1..x_n and codes
n+1..2n are their negations. Clauses are stored as (lo, hi) with lo < hi and
formulas keep their clauses deduplicated in lexicographic order, so equal
formulas compare equal and serialize to identical text.
"""

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.logger import get_logger


class TwoSatLpError(Exception):
    """Base class for every error raised by this package."""


class FormulaError(TwoSatLpError):
    pass


class DimacsError(FormulaError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Clause(NamedTuple):
    lo: int
    hi: int


class Verdict(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"


@dataclass(frozen=True)
class Certificate:
    """
    A checkable satisfiability verdict.

    Sat certificates carry one truth value per variable. Unsat certificates
    carry the witness variable i and two literal-code paths, x_i -> x̄_i and
    x̄_i -> x_i, over implications of present clauses.
    """

    verdict: Verdict
    assignment: Optional[Tuple[bool, ...]] = None
    witness: Optional[int] = None
    paths: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None

    @classmethod
    def sat(cls, assignment):
        return cls(Verdict.SAT, assignment=tuple(bool(v) for v in assignment))

    @classmethod
    def unsat(cls, witness, forward=None, backward=None):
        paths = None
        if forward is not None and backward is not None:
            paths = (tuple(forward), tuple(backward))
        return cls(Verdict.UNSAT, witness=witness, paths=paths)

    @property
    def is_sat(self):
        return self.verdict is Verdict.SAT


def check_literal(code, n):
    if not isinstance(code, (int, np.integer)) or isinstance(code, bool):
        raise FormulaError(f"literal code must be an integer, got {code!r}")
    if n < 1:
        raise FormulaError(f"variable count must be positive, got {n}")
    if not 1 <= code <= 2 * n:
        raise FormulaError(f"literal code {code} outside [1, {2 * n}]")
    return int(code)


def negate(code, n):
    """Return the complementary literal code, indices taken mod 2n."""
    code = check_literal(code, n)
    return code + n if code <= n else code - n


def is_tautology(lo, hi, n):
    return lo <= n and hi == lo + n


def make_clause(a, b, n):
    """Canonicalize two literal codes into a clause, rejecting degenerate ones."""
    a = check_literal(a, n)
    b = check_literal(b, n)
    if a == b:
        raise FormulaError(f"clause repeats literal {a}; unit clauses are not 2SAT")
    lo, hi = (a, b) if a < b else (b, a)
    if is_tautology(lo, hi, n):
        raise FormulaError(f"clause ({lo}, {hi}) is a tautology")
    return Clause(lo, hi)


def clause_universe(n):
    """
    All unordered pairs of distinct literal codes in lexicographic order.

    The list has 2n²-n slots; the n tautology slots {i, n+i} are included so
    the indicator length matches the closed form, and are flagged by
    is_tautology().
    """
    if n < 1:
        raise FormulaError(f"variable count must be positive, got {n}")
    size = 2 * n
    return [Clause(a, b) for a in range(1, size + 1) for b in range(a + 1, size + 1)]


def non_tautological_universe(n):
    return [c for c in clause_universe(n) if not is_tautology(c.lo, c.hi, n)]


def slot_index(clause, n):
    """Position of a clause in clause_universe(n), in closed form."""
    a, b = clause
    size = 2 * n
    return (a - 1) * size - (a - 1) * a // 2 + (b - a - 1)


@dataclass(frozen=True)
class Formula:
    n: int
    clauses: Tuple[Clause, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise FormulaError(f"variable count must be a positive integer, got {self.n!r}")
        previous = None
        for clause in self.clauses:
            lo, hi = clause
            check_literal(lo, self.n)
            check_literal(hi, self.n)
            if lo >= hi:
                raise FormulaError(f"clause ({lo}, {hi}) is not canonical")
            if is_tautology(lo, hi, self.n):
                raise FormulaError(f"clause ({lo}, {hi}) is a tautology")
            if previous is not None and previous >= clause:
                raise FormulaError("clauses must be unique and sorted; use Formula.of()")
            previous = clause

    @classmethod
    def of(cls, n, pairs: Iterable[Sequence[int]] = ()):
        """Build a formula from literal-code pairs, canonicalizing and deduplicating."""
        clauses = {make_clause(a, b, n) for a, b in pairs}
        return cls(n, tuple(sorted(clauses)))

    @classmethod
    def from_signed(cls, n, pairs: Iterable[Sequence[int]] = ()):
        """Build from DIMACS-style signed literals (v for x_v, -v for x̄_v)."""
        return cls.of(n, [(from_signed(a, n), from_signed(b, n)) for a, b in pairs])

    @cached_property
    def clause_set(self):
        return frozenset(self.clauses)

    @property
    def m(self):
        return len(self.clauses)

    def __contains__(self, clause):
        return Clause(*clause) in self.clause_set


@dataclass(frozen=True)
class FormulaIndicator:
    n: int
    bits: Tuple[int, ...]

    @property
    def popcount(self):
        return sum(self.bits)


def to_indicator(f):
    bits = [0] * (2 * f.n * f.n - f.n)
    for clause in f.clauses:
        bits[slot_index(clause, f.n)] = 1
    return FormulaIndicator(f.n, tuple(bits))


def from_signed(value, n):
    if value == 0 or abs(value) > n:
        raise FormulaError(f"signed literal {value} outside ±[1, {n}]")
    return value if value > 0 else n - value


def to_signed(code, n):
    code = check_literal(code, n)
    return code if code <= n else -(code - n)


def literal_value(code, assignment, n):
    if code <= n:
        return bool(assignment[code - 1])
    return not assignment[code - n - 1]


def evaluate(f, assignment):
    """True iff every clause of f has a true literal under the assignment."""
    if len(assignment) != f.n:
        raise FormulaError(f"assignment has {len(assignment)} values, formula has {f.n} variables")
    return all(
        literal_value(lo, assignment, f.n) or literal_value(hi, assignment, f.n)
        for lo, hi in f.clauses
    )


class DimacsParse(NamedTuple):
    formula: Formula
    declared_clauses: int
    tautologies_dropped: int
    duplicates_dropped: int


def read_dimacs(text):
    """
    Parse strict-2SAT DIMACS CNF.

    Clauses may span lines; each must hold exactly two nonzero literals.
    Tautologies are dropped and duplicates merged, both counted in the result.
    """
    if not isinstance(text, str):
        text = text.read()

    n = None
    declared = 0
    seen = set()
    tautologies = 0
    duplicates = 0
    pending = []
    pending_line = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise DimacsError("duplicate problem line", line_no)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header: {line!r}", line_no)
            try:
                n, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header: {line!r}", line_no) from None
            if n < 1 or declared < 0:
                raise DimacsError(f"malformed header: {line!r}", line_no)
            continue
        if n is None:
            raise DimacsError("clause before the 'p cnf' header", line_no)

        for token in line.split():
            try:
                value = int(token)
            except ValueError:
                raise DimacsError(f"not an integer: {token!r}", line_no) from None
            if value != 0:
                if not pending:
                    pending_line = line_no
                if abs(value) > n:
                    raise DimacsError(f"variable {abs(value)} exceeds n={n}", line_no)
                pending.append(value)
                continue

            if len(pending) != 2:
                noun = "literal" if len(pending) == 1 else "literals"
                raise DimacsError(f"clause has {len(pending)} {noun}", pending_line or line_no)
            a, b = (from_signed(v, n) for v in pending)
            pending = []
            if a == b:
                raise DimacsError("clause repeats a literal", pending_line)
            lo, hi = min(a, b), max(a, b)
            if is_tautology(lo, hi, n):
                tautologies += 1
                continue
            clause = Clause(lo, hi)
            if clause in seen:
                duplicates += 1
                continue
            seen.add(clause)

    if n is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        raise DimacsError("last clause is not terminated by 0", pending_line)

    formula = Formula(n, tuple(sorted(seen)))
    logger = get_logger()
    if tautologies:
        logger.warning(f"Dropped {tautologies} tautological clause(s)")
    if duplicates:
        logger.debug(f"Merged {duplicates} duplicate clause(s)")
    if declared != formula.m + tautologies + duplicates:
        logger.warning(
            f"Header declares {declared} clauses, file holds {formula.m + tautologies + duplicates}"
        )
    return DimacsParse(formula, declared, tautologies, duplicates)


def parse_dimacs(text):
    return read_dimacs(text).formula


def serialize_dimacs(f):
    lines = [f"p cnf {f.n} {f.m}"]
    for lo, hi in f.clauses:
        lines.append(f"{to_signed(lo, f.n)} {to_signed(hi, f.n)} 0")
    return "\n".join(lines) + "\n"


def formula_from_mask(n, mask, universe=None):
    """The formula whose clauses are the set bits of mask over the non-tautological universe."""
    universe = universe if universe is not None else non_tautological_universe(n)
    if mask < 0 or mask >> len(universe):
        raise FormulaError(f"mask {mask} out of range for n={n}")
    return Formula(n, tuple(c for b, c in enumerate(universe) if mask >> b & 1))


def instance_seed(seed, n, density, trial):
    sequence = np.random.SeedSequence([int(seed), int(n), int(round(density * 1000)), int(trial)])
    return int(sequence.generate_state(1)[0])


def random_formula(n, density, seed):
    """m = floor(density * (2n²-2n)) clauses drawn uniformly without replacement."""
    if not 0 <= density <= 1:
        raise FormulaError(f"density must lie in [0, 1], got {density}")
    universe = non_tautological_universe(n)
    m = int(density * len(universe))
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(universe), size=m, replace=False) if m else []
    return Formula(n, tuple(sorted(universe[int(i)] for i in picked)))
