import time
from dataclasses import dataclass
from typing import Optional

from src.certificate import DecodeError, decide_from_solution, verify_certificate
from src.config import BRUTE_FORCE_MAX_N, MODES
from src.formula import Certificate, TwoSatLpError
from src.implication import apt_decide
from src.lp_model import CapacityMode, LpModelError, build_face_lp, build_theorem_lp
from src.lp_solver import SolverError, SolverOptions, SolveResult, solve, solve_decomposed
from src.qn_oracle import brute_force_sat

# brute force joins --check only where 2^n stays cheap
CHECK_BRUTE_MAX_N = 16


def format_zstar(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


@dataclass(frozen=True)
class RunOutcome:
    mode: str
    certificate: Certificate
    zstar: Optional[object] = None
    pivots: int = 0
    elapsed: float = 0.0
    solution: Optional[SolveResult] = None


class ModeRunner:
    """Runs one decision mode on a formula with options taken from the settings."""

    def __init__(self, settings_manager, logger):
        self.settings_manager = settings_manager
        self.logger = logger

    def _get_solver_options(self):
        return SolverOptions.from_settings(self.settings_manager)

    def _get_capacity(self):
        return CapacityMode(self.settings_manager.get("capacity_mode", "unit"))

    def _solve_lp(self, f, mode):
        if f.n < 2:
            raise LpModelError(
                f"{mode} needs n >= 2 (P_n starts at n = 2) but the formula has n={f.n}; "
                "use --mode apt or --mode brute"
            )
        options = self._get_solver_options()
        capacity = self._get_capacity()
        if mode == "lp-fixing":
            sol = solve(build_face_lp(f, capacity), options, self.logger)
        elif mode == "lp-decomposed":
            sol = solve_decomposed(build_theorem_lp(f, capacity), options, self.logger)
        else:
            sol = solve(build_theorem_lp(f, capacity), options, self.logger)

        if not sol.optimal:
            # P_n always has an optimum; anything else is an internal fault
            raise SolverError(
                f"{mode} returned {sol.status.value} on P_{f.n} after {sol.pivots} pivots"
            )
        return sol

    def run(self, f, mode="lp"):
        if mode not in MODES:
            raise TwoSatLpError(f"unknown mode {mode!r}")

        started = time.perf_counter()
        sol = None
        if mode == "apt":
            cert = apt_decide(f)
        elif mode == "brute":
            cert = brute_force_sat(f)
        else:
            sol = self._solve_lp(f, mode)
            cert = decide_from_solution(sol, f)
        elapsed = time.perf_counter() - started

        if not verify_certificate(f, cert):
            self.logger.error(f"{mode} produced a certificate that fails verification")
            raise DecodeError(f"{mode} certificate failed verification")

        self.logger.debug(f"{mode}: {cert.verdict.value} on n={f.n}, m={f.m} in {elapsed:.4f}s")
        return RunOutcome(
            mode=mode,
            certificate=cert,
            zstar=sol.objective if sol is not None else None,
            pivots=sol.pivots if sol is not None else 0,
            elapsed=elapsed,
            solution=sol,
        )

    def cross_check(self, f, outcome):
        """Modes whose verdict differs from the outcome's, as (mode, verdict) pairs."""
        oracles = [apt_decide(f)]
        names = ["apt"]
        if f.n <= min(CHECK_BRUTE_MAX_N, BRUTE_FORCE_MAX_N):
            oracles.append(brute_force_sat(f))
            names.append("brute")
        mismatches = [
            (name, cert.verdict)
            for name, cert in zip(names, oracles)
            if cert.verdict is not outcome.certificate.verdict
        ]
        for name, verdict in mismatches:
            self.logger.critical(
                f"{outcome.mode} says {outcome.certificate.verdict.value}, {name} says {verdict.value}"
            )
        return mismatches
