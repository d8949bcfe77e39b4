"""
Bounded-variable primal simplex for LpInstance.

Nonbasic variables rest at their lower or upper bound, so bounds never
become rows and the basis stays at one row per equality. The basis inverse
is kept explicitly as a dense numpy array: float64 in float mode
(refactorized periodically), an object array of Fractions in rational mode
(exact, never refactorized).

Each row gets an artificial column. When the zero start is feasible, which
is always the case for P_n, the artificials are fixed at [0, 0] from the
start and no Phase 1 is needed.
"""

import enum
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, TextIO, Tuple

import numpy as np

from src.formula import TwoSatLpError
from src.logger import get_logger
from src.lp_model import decompose, row_of


class SolverError(TwoSatLpError):
    pass


class Arithmetic(enum.Enum):
    FLOAT = "float"
    RATIONAL = "rational"


class PivotRule(enum.Enum):
    DANTZIG = "dantzig"  # falls back to Bland after a run of degenerate pivots
    BLAND = "bland"


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    ITERATION_LIMIT = "iteration_limit"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SolverOptions:
    arithmetic: Arithmetic = Arithmetic.FLOAT
    tolerance: float = 1e-7
    pivot_rule: PivotRule = PivotRule.DANTZIG
    degenerate_threshold: int = 50
    iteration_cap: Optional[int] = None
    iteration_factor: int = 50
    refactor_interval: int = 100
    pivot_log: Optional[TextIO] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise SolverError(f"tolerance must be positive, got {self.tolerance}")
        for name in ("degenerate_threshold", "iteration_factor", "refactor_interval"):
            if getattr(self, name) <= 0:
                raise SolverError(f"{name} must be positive")
        if self.iteration_cap is not None and self.iteration_cap <= 0:
            raise SolverError("iteration_cap must be positive")

    @classmethod
    def from_settings(cls, settings_manager, **overrides):
        options = cls(
            arithmetic=Arithmetic(settings_manager.get("arithmetic", "float")),
            tolerance=float(settings_manager.get("tolerance", 1e-7)),
            pivot_rule=PivotRule(settings_manager.get("pivot_rule", "dantzig")),
            degenerate_threshold=int(settings_manager.get("degenerate_threshold", 50)),
            iteration_factor=int(settings_manager.get("iteration_factor", 50)),
            refactor_interval=int(settings_manager.get("refactor_interval", 100)),
        )
        return replace(options, **overrides) if overrides else options

    @property
    def exact(self):
        return self.arithmetic is Arithmetic.RATIONAL

    def cap_for(self, lp):
        if self.iteration_cap is not None:
            return self.iteration_cap
        return self.iteration_factor * (lp.num_rows + lp.num_vars)


@dataclass(frozen=True)
class SolveResult:
    """
    status and, when OPTIMAL, z* = objective·primal at a basic solution.

    basis lists the basic column of every row; artificial columns are
    numbered num_vars + row. at_upper lists nonbasic columns resting at
    their upper bound.
    """

    status: SolveStatus
    objective: object
    primal: Tuple[object, ...]
    basis: Tuple[int, ...]
    at_upper: Tuple[int, ...]
    pivots: int
    iterations: int
    arithmetic: Arithmetic
    elapsed: float = 0.0

    @property
    def optimal(self):
        return self.status is SolveStatus.OPTIMAL


BASIC, AT_LOWER, AT_UPPER = 0, 1, 2


class BoundedSimplex:
    def __init__(self, lp, options=None, logger=None):
        self.lp = lp
        self.options = options or SolverOptions()
        self.logger = logger or get_logger()
        self.exact = self.options.exact

        if self.exact:
            self.num = Fraction
            self.dtype = object
            self.tol = Fraction(0)
            self.pivot_tol = Fraction(0)
        else:
            self.num = float
            self.dtype = np.float64
            self.tol = self.options.tolerance
            self.pivot_tol = 1e-9

        m, n_struct = lp.num_rows, lp.num_vars
        self.m = m
        self.n_struct = n_struct
        total = n_struct + m

        entries = [[] for _ in range(total)]
        for r, row in enumerate(lp.rows):
            for col, coef in row:
                entries[col].append((r, coef))
        for r in range(m):
            entries[n_struct + r].append((r, 1))
        width = max(len(e) for e in entries) if entries else 1

        # padded column storage; row index m is a dummy row with zero dual
        self.col_rows = np.full((total, width), m, dtype=np.int64)
        self.col_coefs = self._full((total, width), 0)
        for j, column in enumerate(entries):
            for pos, (r, coef) in enumerate(column):
                self.col_rows[j, pos] = r
                self.col_coefs[j, pos] = self.num(coef)

        self.rhs = self._vector(lp.rhs)
        self.lower = self._vector(list(lp.lower) + [0] * m)
        self.upper = self._vector(
            [np.inf if u is None else u for u in lp.upper] + [0] * m, keep_inf=True
        )
        self.cost = self._vector(list(lp.objective) + [0] * m)

        self.x = self.lower.copy()
        self.state = np.full(total, AT_LOWER, dtype=np.int8)
        self.head = np.arange(n_struct, total, dtype=np.int64)
        self.state[self.head] = BASIC

        self.pivots = 0
        self.iterations = 0
        self.since_refactor = 0

    # --- arithmetic helpers ---------------------------------------------------

    def _full(self, shape, value):
        return np.full(shape, self.num(value), dtype=self.dtype)

    def _vector(self, values, keep_inf=False):
        if keep_inf:
            return np.array(
                [v if v == np.inf else self.num(v) for v in values], dtype=self.dtype
            )
        return np.array([self.num(v) for v in values], dtype=self.dtype)

    def _column(self, j):
        rows = self.col_rows[j]
        keep = rows < self.m
        return rows[keep], self.col_coefs[j][keep]

    def _is_positive(self, values, threshold):
        return np.asarray(values > threshold, dtype=bool)

    # --- basis ----------------------------------------------------------------

    def _start(self):
        """Artificial basis at the lower-bound point; returns True if Phase 1 is needed."""
        residual = self.rhs.copy()
        for j in np.flatnonzero(self.x[: self.n_struct] != 0):
            rows, coefs = self._column(j)
            residual[rows] -= coefs * self.x[j]

        signs = [self.num(1) if r >= 0 else self.num(-1) for r in residual]
        self.binv = self._full((self.m, self.m), 0)
        for r, s in enumerate(signs):
            self.col_coefs[self.n_struct + r, 0] = s
            self.binv[r, r] = s
            self.x[self.n_struct + r] = abs(residual[r])

        needs_phase_one = any(abs(v) > self.tol for v in residual)
        if needs_phase_one:
            self.upper[self.n_struct:] = np.inf
        return needs_phase_one

    def _refactor(self):
        basis = np.zeros((self.m, self.m))
        for r, j in enumerate(self.head):
            rows, coefs = self._column(j)
            basis[rows, r] = coefs
        self.binv = np.linalg.inv(basis)

        residual = self.rhs.astype(np.float64).copy()
        nonbasic = np.flatnonzero((self.state != BASIC) & (self.x != 0))
        for j in nonbasic:
            rows, coefs = self._column(j)
            residual[rows] -= coefs * self.x[j]
        self.x[self.head] = self.binv @ residual
        self.since_refactor = 0

    def _duals(self, cost):
        cost_basic = cost[self.head]
        nz = np.flatnonzero(cost_basic != 0)
        duals = self._full(self.m + 1, 0)
        if len(nz):
            duals[: self.m] = cost_basic[nz] @ self.binv[nz]
        return duals

    def _reduced_costs(self, cost):
        duals = self._duals(cost)
        d = cost - (self.col_coefs * duals[self.col_rows]).sum(axis=1)
        d[self.head] = 0
        return d

    def _ftran(self, j):
        rows, coefs = self._column(j)
        alpha = self._full(self.m, 0)
        for r, coef in zip(rows, coefs):
            alpha = alpha + coef * self.binv[:, r]
        return alpha

    # --- iterations -----------------------------------------------------------

    def _choose_entering(self, d, use_bland):
        movable = self._is_positive(self.upper, self.lower)
        up = (self.state == AT_LOWER) & movable & self._is_positive(d, self.tol)
        down = (self.state == AT_UPPER) & self._is_positive(-d, self.tol)
        eligible = np.flatnonzero(up | down)
        if len(eligible) == 0:
            return None
        if use_bland:
            return int(eligible[0])
        magnitudes = np.abs(d[eligible])
        return int(eligible[int(np.argmax(magnitudes))])

    def _ratio_test(self, q, sigma, alpha, use_bland):
        delta = alpha * sigma
        basic_lower = self.lower[self.head]
        basic_upper = self.upper[self.head]
        basic_x = self.x[self.head]

        limits = []
        falling = np.flatnonzero(self._is_positive(delta, self.pivot_tol))
        if len(falling):
            limits.append((falling, (basic_x[falling] - basic_lower[falling]) / delta[falling]))
        rising = np.flatnonzero(self._is_positive(-delta, self.pivot_tol))
        rising = rising[np.asarray(basic_upper[rising] != np.inf, dtype=bool)]
        if len(rising):
            limits.append((rising, (basic_upper[rising] - basic_x[rising]) / -delta[rising]))

        theta_flip = self.upper[q] - self.lower[q]
        if not limits:
            return theta_flip, None, delta

        rows = np.concatenate([r for r, _ in limits])
        ratios = np.concatenate([v for _, v in limits])
        theta = ratios.min()
        if not self.exact:
            theta = max(theta, 0.0)
        if theta_flip <= theta:
            return theta_flip, None, delta

        ties = rows[self._is_positive(theta + self.tol, ratios) | np.asarray(ratios == theta, dtype=bool)]
        if use_bland:
            leaving_row = min(ties, key=lambda r: self.head[r])
        else:
            leaving_row = min(ties, key=lambda r: (-abs(delta[r]), self.head[r]))
        return theta, int(leaving_row), delta

    def _pivot(self, q, p, alpha):
        pivot_row = self.binv[p] / alpha[p]
        others = np.flatnonzero(np.asarray(alpha != 0, dtype=bool))
        others = others[others != p]
        if len(others):
            self.binv[others] -= np.outer(alpha[others], pivot_row)
        self.binv[p] = pivot_row
        self.head[p] = q
        self.pivots += 1
        self.since_refactor += 1

    def _run(self, cost, phase):
        cap = self.options.cap_for(self.lp)
        use_bland = self.options.pivot_rule is PivotRule.BLAND
        degenerate_run = 0
        objective = (cost * self.x).sum()

        while True:
            if self.iterations >= cap:
                self.logger.warning(
                    f"Simplex phase {phase} hit the iteration cap ({cap}) after {self.pivots} pivots"
                )
                return SolveStatus.ITERATION_LIMIT
            if not self.exact and self.since_refactor >= self.options.refactor_interval:
                self._refactor()

            d = self._reduced_costs(cost)
            q = self._choose_entering(d, use_bland)
            if q is None:
                return SolveStatus.OPTIMAL

            sigma = 1 if self.state[q] == AT_LOWER else -1
            alpha = self._ftran(q)
            theta, p, delta = self._ratio_test(q, sigma, alpha, use_bland)
            if theta == np.inf:
                return SolveStatus.UNBOUNDED

            self.iterations += 1
            self.x[self.head] = self.x[self.head] - theta * delta
            self.x[q] = self.x[q] + sigma * theta
            objective = objective + d[q] * sigma * theta

            if p is None:
                self.state[q] = AT_UPPER if sigma > 0 else AT_LOWER
                self.x[q] = self.upper[q] if sigma > 0 else self.lower[q]
                leaving = "-"
            else:
                leaving = int(self.head[p])
                leaves_low = delta[p] > 0
                self.state[leaving] = AT_LOWER if leaves_low else AT_UPPER
                self.x[leaving] = self.lower[leaving] if leaves_low else self.upper[leaving]
                self.state[q] = BASIC
                self._pivot(q, p, alpha)

            if self.options.pivot_log is not None:
                rule = "bland" if use_bland else "dantzig"
                self.options.pivot_log.write(
                    f"{self.iterations} {q} {leaving} {theta} {objective} {rule}\n"
                )

            if theta <= self.tol:
                degenerate_run += 1
                if (
                    not use_bland
                    and self.options.pivot_rule is PivotRule.DANTZIG
                    and degenerate_run >= self.options.degenerate_threshold
                ):
                    self.logger.debug(f"{degenerate_run} degenerate pivots; switching to Bland's rule")
                    use_bland = True
            else:
                degenerate_run = 0
                if use_bland and self.options.pivot_rule is PivotRule.DANTZIG:
                    use_bland = False

    def solve(self):
        started = time.perf_counter()
        status = SolveStatus.OPTIMAL

        if self._start():
            phase_one_cost = self._full(len(self.cost), 0)
            phase_one_cost[self.n_struct:] = self.num(-1)
            status = self._run(phase_one_cost, phase=1)
            infeasibility = self.x[self.n_struct:].sum()
            if status is SolveStatus.OPTIMAL and infeasibility > self.tol:
                status = SolveStatus.INFEASIBLE
            self.upper[self.n_struct:] = self.num(0)

        if status is SolveStatus.OPTIMAL:
            status = self._run(self.cost, phase=2)

        primal = self.x[: self.n_struct]
        objective = (self.cost[: self.n_struct] * primal).sum() if self.n_struct else self.num(0)
        if self.exact:
            primal_values = tuple(Fraction(v) for v in primal)
            objective = Fraction(objective)
        else:
            primal_values = tuple(float(v) for v in primal)
            objective = float(objective)

        elapsed = time.perf_counter() - started
        self.logger.debug(
            f"Simplex {status.value}: z*={objective} after {self.pivots} pivots "
            f"({self.iterations} iterations, {elapsed:.4f}s)"
        )
        return SolveResult(
            status=status,
            objective=objective,
            primal=primal_values,
            basis=tuple(int(j) for j in self.head),
            at_upper=tuple(int(j) for j in np.flatnonzero(self.state == AT_UPPER)),
            pivots=self.pivots,
            iterations=self.iterations,
            arithmetic=self.options.arithmetic,
            elapsed=elapsed,
        )


def solve(lp, options=None, logger=None):
    return BoundedSimplex(lp, options, logger).solve()


def solve_decomposed(lp, options=None, logger=None):
    """Solve each commodity separately and merge by commodity index."""
    options = options or SolverOptions()
    subs = decompose(lp)
    results = [solve(sub, options, logger) for sub in subs]

    zero = Fraction(0) if options.exact else 0.0
    primal = [zero] * lp.num_vars
    basis = []
    at_upper = []
    for sub, result in zip(subs, results):
        for local, value in enumerate(result.primal):
            primal[sub.columns[local]] = value

        def to_global(j, sub=sub):
            if j < sub.num_vars:
                return sub.columns[j]
            return lp.num_vars + row_of(sub.commodity, j - sub.num_vars + 1, lp.n)

        basis.extend(to_global(j) for j in result.basis)
        at_upper.extend(to_global(j) for j in result.at_upper)

    statuses = [r.status for r in results]
    status = next((s for s in statuses if s is not SolveStatus.OPTIMAL), SolveStatus.OPTIMAL)
    return SolveResult(
        status=status,
        objective=sum((r.objective for r in results), zero),
        primal=tuple(primal),
        basis=tuple(basis),
        at_upper=tuple(sorted(at_upper)),
        pivots=sum(r.pivots for r in results),
        iterations=sum(r.iterations for r in results),
        arithmetic=options.arithmetic,
        elapsed=sum(r.elapsed for r in results),
    )


def verify_feasible(lp, primal, tol=1e-7):
    if len(primal) != lp.num_vars:
        return False
    for row, rhs in zip(lp.rows, lp.rhs):
        if abs(sum(coef * primal[col] for col, coef in row) - rhs) > tol:
            return False
    for value, lo, up in zip(primal, lp.lower, lp.upper):
        if lo is not None and value < lo - tol:
            return False
        if up is not None and value > up + tol:
            return False
    return True


def verify_integral(primal, tol=1e-6):
    return all(min(abs(v), abs(v - 1)) <= tol for v in primal)
