import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import MagicMock

import pytest

# Add src to path to allow importing
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from src.formula import Certificate, random_formula
from src.runner import ModeRunner, RunOutcome
from src.settings_manager import SettingsManager
from src.worker import BenchJob, BenchWorker


class TestBenchJob(unittest.TestCase):

    def test_instance_seed_is_stable(self):
        job = BenchJob(4, 0.3, 1, 0)
        self.assertEqual(job.instance_seed, BenchJob(4, 0.3, 1, 0).instance_seed)
        self.assertNotEqual(job.instance_seed, BenchJob(4, 0.3, 2, 0).instance_seed)


class TestBenchWorker(unittest.TestCase):

    @pytest.fixture(autouse=True)
    def _qtbot(self, qtbot):
        self.qtbot = qtbot

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.settings_manager = SettingsManager(config_dir=self.temp_dir)
        self.mock_logger = MagicMock()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_rows_for_every_job_and_mode(self):
        runner = ModeRunner(self.settings_manager, self.mock_logger)
        jobs = [BenchJob(3, 0.3, trial, 0) for trial in range(3)]
        worker = BenchWorker(jobs, runner, ["lp", "apt"], self.mock_logger)
        with self.qtbot.waitSignal(worker.taskFinished, timeout=60000) as blocker:
            worker.start()
        worker.wait()

        self.assertEqual(blocker.args, [0])
        self.assertEqual(len(worker.rows), 6)
        self.assertIsNone(worker.disagreement)
        first = worker.rows[0]
        self.assertEqual(first["mode"], "lp")
        self.assertEqual(first["n"], 3)
        self.assertEqual(first["seed"], jobs[0].instance_seed)
        self.assertEqual(first["m"], random_formula(3, 0.3, jobs[0].instance_seed).m)
        self.assertEqual(worker.rows[1]["zstar"], "")

    def test_disagreement_stops_the_batch(self):
        runner = MagicMock()

        def fake_run(formula, mode):
            assignment = (True,) * formula.n
            cert = Certificate.sat(assignment) if mode == "lp" else Certificate.unsat(1)
            return RunOutcome(mode=mode, certificate=cert, zstar=0.0, pivots=1, elapsed=0.001)

        runner.run.side_effect = fake_run
        jobs = [BenchJob(2, 0.5, trial, 0) for trial in range(3)]
        worker = BenchWorker(jobs, runner, ["lp", "apt"], self.mock_logger)
        failures = []
        finished = []
        worker.taskFailedWithLog.connect(lambda code, text: failures.append((code, text)))
        worker.taskFinished.connect(finished.append)

        worker.run()

        self.assertEqual(finished, [2])
        self.assertEqual(len(failures), 1)
        self.assertTrue(failures[0][1].startswith("p cnf 2 "))
        job, formula, verdicts = worker.disagreement
        self.assertEqual(job, jobs[0])
        self.assertEqual(formula.n, 2)
        self.assertEqual(set(verdicts), {"lp", "apt"})
        self.assertEqual(len(worker.rows), 2)
        self.mock_logger.critical.assert_called()

    def test_exception_reports_error(self):
        runner = MagicMock()
        runner.run.side_effect = RuntimeError("boom")
        worker = BenchWorker([BenchJob(2, 0.5, 0, 0)], runner, ["lp"], self.mock_logger)
        finished = []
        worker.taskFinished.connect(finished.append)

        worker.run()

        self.assertEqual(finished, [1])
        self.assertIn("error", worker.disagreement[2])
        self.mock_logger.error.assert_called()

    def test_stop_before_start(self):
        runner = MagicMock()
        worker = BenchWorker([BenchJob(2, 0.5, 0, 0)], runner, ["lp"], self.mock_logger)
        worker.stop()
        worker.run()
        runner.run.assert_not_called()
        self.assertEqual(worker.rows, [])


if __name__ == '__main__':
    unittest.main()
