from dataclasses import dataclass
from PyQt6.QtCore import QThread, pyqtSignal

from src.formula import instance_seed, random_formula, serialize_dimacs
from src.runner import format_zstar


@dataclass(frozen=True)
class BenchJob:
    n: int
    density: float
    trial: int
    seed: int

    @property
    def instance_seed(self):
        return instance_seed(self.seed, self.n, self.density, self.trial)


class BenchWorker(QThread):
    """Runs a batch of bench jobs through every requested mode; stop() takes effect between jobs."""

    taskFailedWithLog = pyqtSignal(int, str)
    taskFinished = pyqtSignal(int)

    def __init__(self, jobs, runner, modes, logger, parent=None):
        super().__init__(parent)
        self.jobs = list(jobs)
        self.runner = runner
        self.modes = list(modes)
        self.logger = logger
        self.rows = []
        self.disagreement = None
        self._is_stopped = False

    def run(self):
        return_code = 0

        for job in self.jobs:
            if self._is_stopped:
                break

            seed = job.instance_seed
            formula = random_formula(job.n, job.density, seed)
            verdicts = {}

            try:
                for mode in self.modes:
                    outcome = self.runner.run(formula, mode)
                    verdicts[mode] = outcome.certificate.verdict
                    row = {
                        "n": job.n,
                        "m": formula.m,
                        "seed": seed,
                        "mode": mode,
                        "verdict": outcome.certificate.verdict.value,
                        "zstar": format_zstar(outcome.zstar),
                        "pivots": outcome.pivots,
                        "micros": int(outcome.elapsed * 1e6),
                        "_order": (job.n, job.density, job.trial, self.modes.index(mode)),
                    }
                    self.rows.append(row)
            except Exception as e:
                error_message = f"Bench job n={job.n} density={job.density} trial={job.trial} failed: {e}"
                self.logger.error(error_message)
                self.disagreement = (job, formula, {"error": str(e)})
                return_code = 1
                self.taskFailedWithLog.emit(return_code, serialize_dimacs(formula))
                break

            if len(set(verdicts.values())) > 1:
                summary = ", ".join(f"{m}={v.value}" for m, v in verdicts.items())
                self.logger.critical(
                    f"Modes disagree on n={job.n} density={job.density} trial={job.trial}: {summary}"
                )
                self.disagreement = (job, formula, verdicts)
                return_code = 2
                self.taskFailedWithLog.emit(return_code, serialize_dimacs(formula))
                break

        self.taskFinished.emit(return_code)

    def stop(self):
        self._is_stopped = True
