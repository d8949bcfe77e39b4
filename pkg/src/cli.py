"""
Command-line front end: solve, export, qn, bench and verify.

Every command returns a process exit status; library exceptions are caught
here, logged, and turned into EXIT_ERROR.
"""

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Optional, Tuple

from PyQt6.QtCore import Qt

from src.certificate import certificate_from_json, certificate_to_json, verify_certificate
from src.config import (
    BENCH_CSV_HEADER,
    BENCH_DEFAULTS,
    EXIT_DISAGREEMENT,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_SAT,
    EXIT_UNSAT,
    MODES,
)
from src.formula import TwoSatLpError, Verdict, read_dimacs, serialize_dimacs
from src.logger import initialize_logger
from src.lp_model import CapacityMode, build_face_lp, build_theorem_lp, column_map_json, export_mps
from src.qn_oracle import prop1_unweighted, prop1_weighted, sweep, sweep_csv
from src.runner import ModeRunner, format_zstar
from src.worker import BenchJob, BenchWorker


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    mode: str = "lp"
    arithmetic: Optional[str] = None
    capacity: Optional[str] = None
    output: Optional[str] = None
    check: bool = False
    fixing: bool = False
    column_map: Optional[str] = None
    certificate: Optional[str] = None
    n: Optional[int] = None
    all_formulas: bool = False
    weights: Optional[Tuple[int, ...]] = None
    csv: Optional[str] = None
    sizes: Tuple[int, ...] = BENCH_DEFAULTS["sizes"]
    densities: Tuple[float, ...] = BENCH_DEFAULTS["densities"]
    trials: int = BENCH_DEFAULTS["trials"]
    modes: Tuple[str, ...] = BENCH_DEFAULTS["modes"]
    seed: Optional[int] = None
    workers: Optional[int] = None
    verbose: bool = False
    save_settings: bool = False

    @classmethod
    def from_args(cls, args):
        values = {name: getattr(args, name, None) for name in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in values.items() if v is not None})


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _mode_list(text):
    modes = tuple(v.strip() for v in text.split(",") if v.strip())
    unknown = [m for m in modes if m not in MODES]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown mode(s): {', '.join(unknown)}")
    return modes


def build_parser():
    parser = argparse.ArgumentParser(
        prog="twosat-lp", description="Decide 2SAT through a compact multicommodity flow LP."
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="log INFO messages to stderr")
    parser.add_argument("--save-settings", action="store_true", help="persist solver flags as new defaults")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--arithmetic", choices=("float", "rational"))
    solver.add_argument("--capacity", choices=tuple(c.value for c in CapacityMode))

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[solver], help="decide a DIMACS formula")
    p.add_argument("input", help="DIMACS file, '-' for stdin")
    p.add_argument("--mode", choices=MODES, default="lp")
    p.add_argument("--check", action="store_true", help="cross-check the verdict against APT and brute force")
    p.add_argument("--output", "-o", help="write the certificate JSON here instead of stdout")

    p = sub.add_parser("export", parents=[solver], help="write the LP for a formula as MPS")
    p.add_argument("input")
    p.add_argument("--fixing", action="store_true", help="export the face LP instead of the penalty LP")
    p.add_argument("--column-map", help="also write the column map JSON to this path")
    p.add_argument("--output", "-o")

    p = sub.add_parser("qn", help="vertex-enumeration oracle over Q_n (n <= 3)")
    p.add_argument("input", nargs="?")
    p.add_argument("--n", type=int)
    p.add_argument("--all-formulas", action="store_true")
    p.add_argument("--weights", type=_int_list)
    p.add_argument("--csv", help="write the sweep table here")

    p = sub.add_parser("bench", parents=[solver], help="random formulas through several modes")
    p.add_argument("--sizes", type=_int_list, default=BENCH_DEFAULTS["sizes"])
    p.add_argument("--densities", type=_float_list, default=BENCH_DEFAULTS["densities"])
    p.add_argument("--trials", type=int, default=BENCH_DEFAULTS["trials"])
    p.add_argument("--modes", type=_mode_list, default=BENCH_DEFAULTS["modes"])
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--output", "-o", help="CSV path, stdout when omitted")

    p = sub.add_parser("verify", help="check a certificate against a formula")
    p.add_argument("input")
    p.add_argument("certificate")
    return parser


def _read_text(path):
    name = "stdin" if path in (None, "-") else path
    try:
        if path in (None, "-"):
            return sys.stdin.read()
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise TwoSatLpError(f"{name} is not UTF-8 text: byte {e.start} ({e.reason})") from None


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _exit_for(verdict):
    return EXIT_SAT if verdict is Verdict.SAT else EXIT_UNSAT


class Cli:
    def __init__(self, settings_manager, logger):
        self.settings_manager = settings_manager
        self.logger = logger
        self.runner = ModeRunner(settings_manager, logger)

    def apply_overrides(self, cfg):
        overrides = {}
        if cfg.arithmetic is not None:
            overrides["arithmetic"] = cfg.arithmetic
        if cfg.capacity is not None:
            overrides["capacity_mode"] = cfg.capacity
        if cfg.seed is not None:
            overrides["seed"] = cfg.seed
        if cfg.workers is not None:
            overrides["bench_workers"] = cfg.workers
        self.settings_manager.update(overrides)
        if cfg.save_settings:
            self.settings_manager.save_settings()
            self.logger.info(f"Saved settings to {self.settings_manager.settings_path}")

    def _capacity(self):
        return CapacityMode(self.settings_manager.get("capacity_mode", "unit"))

    def cmd_solve(self, cfg):
        f = read_dimacs(_read_text(cfg.input)).formula
        outcome = self.runner.run(f, cfg.mode)
        cert = outcome.certificate
        zstar = format_zstar(outcome.zstar) or "-"
        print(f"{cert.verdict.value} {zstar} {f.n} {f.m} {cfg.mode} {outcome.pivots} {outcome.elapsed:.6f}")

        _write_text(cfg.output, certificate_to_json(cert, f.n) + "\n")

        if cfg.check and self.runner.cross_check(f, outcome):
            return EXIT_DISAGREEMENT
        return _exit_for(cert.verdict)

    def cmd_export(self, cfg):
        f = read_dimacs(_read_text(cfg.input)).formula
        capacity = self._capacity()
        lp = build_face_lp(f, capacity) if cfg.fixing else build_theorem_lp(f, capacity)
        _write_text(cfg.output, export_mps(lp))
        if cfg.column_map:
            _write_text(cfg.column_map, column_map_json(f.n) + "\n")
        self.logger.info(f"Exported {'face' if cfg.fixing else 'penalty'} LP: {lp.num_vars} columns, {lp.num_rows} rows")
        return EXIT_OK

    def cmd_qn(self, cfg):
        if cfg.all_formulas:
            if cfg.n is None:
                raise TwoSatLpError("--all-formulas needs --n")
            rows = sweep(cfg.n, cfg.weights)
            agree = sum(1 for _, verdict, _, _, brute in rows if verdict is brute)
            if cfg.csv:
                _write_text(cfg.csv, sweep_csv(rows))
            print(f"{agree}/{len(rows)} agree")
            return EXIT_OK if agree == len(rows) else EXIT_DISAGREEMENT

        if cfg.input is None:
            raise TwoSatLpError("qn needs an input formula or --n with --all-formulas")
        f = read_dimacs(_read_text(cfg.input)).formula
        result = prop1_weighted(f, cfg.weights) if cfg.weights else prop1_unweighted(f)
        line = f"{result.verdict.value} z*={result.zstar} ones={result.ones}"
        if result.assignment is not None:
            line += " x*=" + "".join(str(int(v)) for v in result.assignment)
        print(line)
        return _exit_for(result.verdict)

    def _bench_jobs(self, cfg):
        seed = int(self.settings_manager.get("seed", 0))
        return [
            BenchJob(n, density, trial, seed)
            for n in cfg.sizes
            for density in cfg.densities
            for trial in range(cfg.trials)
        ]

    def _abort_bench(self, workers, code):
        self.logger.warning(f"Stopping all bench workers (code {code})")
        for worker in workers:
            worker.stop()

    def cmd_bench(self, cfg):
        jobs = self._bench_jobs(cfg)
        worker_count = max(1, min(int(self.settings_manager.get("bench_workers", 1)), len(jobs) or 1))
        workers = [
            BenchWorker(jobs[i::worker_count], self.runner, cfg.modes, self.logger)
            for i in range(worker_count)
        ]
        for worker in workers:
            # no event loop runs here, so handlers execute in the emitting thread
            worker.taskFailedWithLog.connect(
                lambda code, _text, workers=workers: self._abort_bench(workers, code),
                Qt.ConnectionType.DirectConnection,
            )
            worker.taskFinished.connect(
                lambda code: self.logger.debug(f"Bench worker finished with code {code}"),
                Qt.ConnectionType.DirectConnection,
            )
        for worker in workers:
            worker.start()
        for worker in workers:
            worker.wait()

        rows = sorted((row for w in workers for row in w.rows), key=lambda r: r["_order"])
        lines = [",".join(BENCH_CSV_HEADER)]
        lines.extend(",".join(str(row[h]) for h in BENCH_CSV_HEADER) for row in rows)
        _write_text(cfg.output, "\n".join(lines) + "\n")

        failures = sorted(
            (w.disagreement for w in workers if w.disagreement is not None),
            key=lambda d: (d[0].n, d[0].density, d[0].trial),
        )
        if not failures:
            self.logger.info(f"Bench finished: {len(rows)} rows, modes agree")
            return EXIT_OK

        job, formula, details = failures[0]
        triage_dir = os.path.dirname(os.path.abspath(cfg.output)) if cfg.output else os.getcwd()
        triage_path = os.path.join(triage_dir, f"bench-disagreement-{job.instance_seed}.cnf")
        _write_text(triage_path, serialize_dimacs(formula))
        self.logger.critical(f"Offending instance written to {triage_path}")
        return EXIT_ERROR if "error" in details else EXIT_DISAGREEMENT

    def cmd_verify(self, cfg):
        f = read_dimacs(_read_text(cfg.input)).formula
        cert, n = certificate_from_json(_read_text(cfg.certificate))
        if n != f.n:
            self.logger.error(f"Certificate is for n={n}, formula has n={f.n}")
            print("INVALID")
            return EXIT_DISAGREEMENT
        if verify_certificate(f, cert):
            print(f"VALID {cert.verdict.value}")
            return EXIT_OK
        print("INVALID")
        return EXIT_DISAGREEMENT

    def dispatch(self, cfg):
        handler = getattr(self, f"cmd_{cfg.command}")
        try:
            self.apply_overrides(cfg)
            return handler(cfg)
        except TwoSatLpError as e:
            self.logger.error(f"{cfg.command} failed: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_ERROR
        except OSError as e:
            self.logger.error(f"{cfg.command} failed on I/O: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_ERROR


def run(argv, settings_manager, logger=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    cfg = RunConfig.from_args(args)
    if logger is None:
        logger = initialize_logger(settings_manager, verbose=cfg.verbose)
    return Cli(settings_manager, logger).dispatch(cfg)
