"""
Desk-scale model of Q_n, the convex hull of (formula indicator, satisfying
assignment) pairs, by explicit vertex enumeration.

A linear objective over a polytope is maximized at a vertex, so at n <= 3 the
vertex list is the LP oracle. Vertices are stacked into integer matrices once
per n; every objective is evaluated exactly with integer arithmetic (the
weighted objective is scaled by 3W) and converted to a Fraction.
"""

import csv
import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from src.config import BRUTE_FORCE_MAX_N, QN_MAX_N
from src.formula import (
    Certificate,
    FormulaIndicator,
    TwoSatLpError,
    Verdict,
    evaluate,
    formula_from_mask,
    non_tautological_universe,
    to_indicator,
)
from src.implication import unsat_witness
from src.logger import get_logger

CHUNK = 1 << 16


class OracleSizeError(TwoSatLpError):
    pass


@dataclass(frozen=True)
class QnVertex:
    y: FormulaIndicator
    x: Tuple[int, ...]


@dataclass(frozen=True)
class WeightSpec:
    w: Tuple[int, ...]

    @property
    def W(self):
        return sum(abs(v) for v in self.w)


@dataclass(frozen=True)
class Prop1Result:
    zstar: Fraction
    ones: int
    verdict: Verdict
    vertex: QnVertex
    assignment: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class WeightedResult:
    verdict: Verdict
    weight: Optional[int] = None
    assignment: Optional[Tuple[bool, ...]] = None


def _check_qn_size(n):
    if n > QN_MAX_N:
        formulas = 2 ** (2 * n * n - 2 * n)
        raise OracleSizeError(
            f"Q_{n} enumeration refused: {formulas} formulas x {2 ** n} assignments "
            f"= {formulas * 2 ** n} candidate pairs (limit n <= {QN_MAX_N})"
        )


def formula_count(n):
    return 2 ** len(non_tautological_universe(n))


def enumerate_qn_vertices(n):
    """Every (y^φ, x) with x satisfying φ; formulas by mask, assignments lexicographically."""
    _check_qn_size(n)
    universe = non_tautological_universe(n)
    for mask in range(2 ** len(universe)):
        f = formula_from_mask(n, mask, universe)
        y = to_indicator(f)
        for x in itertools.product((0, 1), repeat=n):
            if evaluate(f, x):
                yield QnVertex(y, x)


@lru_cache(maxsize=4)
def _vertex_matrices(n):
    vertices = list(enumerate_qn_vertices(n))
    Y = np.array([v.y.bits for v in vertices], dtype=np.int64)
    X = np.array([v.x for v in vertices], dtype=np.int64)
    get_logger().debug(f"Q_{n}: {len(vertices)} vertices enumerated")
    return Y, X, vertices


def _cost_vector(indicator):
    return np.where(np.array(indicator.bits) == 1, 1, -1).astype(np.int64)


def prop1_unweighted(f):
    """max c·y over Q_n with c = +1 on present clauses, -1 elsewhere."""
    _check_qn_size(f.n)
    Y, _, vertices = _vertex_matrices(f.n)
    indicator = to_indicator(f)
    scores = Y @ _cost_vector(indicator)
    best = int(np.argmax(scores))
    zstar = Fraction(int(scores[best]))
    ones = indicator.popcount

    if zstar == ones:
        verdict = Verdict.SAT
    elif zstar <= ones - 1:
        verdict = Verdict.UNSAT
    else:
        raise TwoSatLpError(f"z*={zstar} falls outside the unweighted dichotomy (1ᵀy={ones})")
    return Prop1Result(zstar, ones, verdict, vertices[best], vertices[best].x)


def prop1_weighted(f, weights):
    """max c·y + w·x / (3W) over Q_n; the maximizer's x is a maximum-weight assignment."""
    _check_qn_size(f.n)
    spec = weights if isinstance(weights, WeightSpec) else WeightSpec(tuple(weights))
    if len(spec.w) != f.n:
        raise TwoSatLpError(f"{len(spec.w)} weights for {f.n} variables")
    if spec.W == 0:
        return prop1_unweighted(f)

    Y, X, vertices = _vertex_matrices(f.n)
    indicator = to_indicator(f)
    scale = 3 * spec.W
    scores = scale * (Y @ _cost_vector(indicator)) + X @ np.array(spec.w, dtype=np.int64)
    best = int(np.argmax(scores))
    zstar = Fraction(int(scores[best]), scale)
    ones = indicator.popcount

    if zstar <= ones - Fraction(2, 3):
        return Prop1Result(zstar, ones, Verdict.UNSAT, vertices[best])
    if zstar >= ones - Fraction(1, 3):
        return Prop1Result(zstar, ones, Verdict.SAT, vertices[best], vertices[best].x)
    raise TwoSatLpError(f"z*={zstar} falls inside the weighted dichotomy gap (1ᵀy={ones})")


def _check_brute_size(n):
    if n > BRUTE_FORCE_MAX_N:
        raise OracleSizeError(f"brute force refused for n={n} (limit {BRUTE_FORCE_MAX_N})")


def _assignment_chunks(f):
    """(first index, bit matrix, satisfied mask) per chunk, in lexicographic order."""
    n = f.n
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        satisfied = np.ones(len(idx), dtype=bool)
        for lo, hi in f.clauses:
            a = bits[:, lo - 1] if lo <= n else 1 - bits[:, lo - n - 1]
            b = bits[:, hi - 1] if hi <= n else 1 - bits[:, hi - n - 1]
            satisfied &= (a | b).astype(bool)
        yield start, bits, satisfied


def brute_force_sat(f):
    _check_brute_size(f.n)
    for _, bits, satisfied in _assignment_chunks(f):
        hits = np.flatnonzero(satisfied)
        if len(hits):
            return Certificate.sat(bool(b) for b in bits[hits[0]])

    witness = unsat_witness(f)
    if witness is None:
        raise TwoSatLpError("no satisfying assignment but no implication witness either")
    return Certificate.unsat(*witness)


def brute_force_weighted(f, weights):
    _check_brute_size(f.n)
    w = np.array(tuple(weights), dtype=np.int64)
    if len(w) != f.n:
        raise TwoSatLpError(f"{len(w)} weights for {f.n} variables")

    best_weight = None
    best_bits = None
    for _, bits, satisfied in _assignment_chunks(f):
        hits = np.flatnonzero(satisfied)
        if not len(hits):
            continue
        scores = bits[hits] @ w
        top = int(np.argmax(scores))
        if best_weight is None or scores[top] > best_weight:
            best_weight = int(scores[top])
            best_bits = bits[hits[top]]

    if best_weight is None:
        return WeightedResult(Verdict.UNSAT)
    return WeightedResult(Verdict.SAT, best_weight, tuple(bool(b) for b in best_bits))


def sweep(n, weights=None):
    """Q_n dichotomy verdict for every formula at this n next to the brute-force verdict."""
    _check_qn_size(n)
    universe = non_tautological_universe(n)
    rows = []
    for mask in range(2 ** len(universe)):
        f = formula_from_mask(n, mask, universe)
        result = prop1_weighted(f, weights) if weights is not None else prop1_unweighted(f)
        rows.append((mask, result.verdict, result.zstar, result.ones, brute_force_sat(f).verdict))
    return rows


def sweep_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["formula", "verdict", "zstar", "ones", "brute"])
    for mask, verdict, zstar, ones, brute in rows:
        writer.writerow([mask, verdict.value, str(zstar), ones, brute.value])
    return buffer.getvalue()
