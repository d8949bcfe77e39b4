import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import MagicMock, patch

# Add src to path to allow importing
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from src.config import LP_MODES, MODES
from src.formula import Certificate, Formula, TwoSatLpError, Verdict, formula_from_mask, random_formula
from src.lp_solver import SolverError, SolveStatus
from src.runner import ModeRunner, RunOutcome, format_zstar
from src.settings_manager import SettingsManager

UNSAT_N2 = Formula.from_signed(2, [(1, 2), (1, -2), (-1, 2), (-1, -2)])


class TestModeRunner(unittest.TestCase):

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.settings_manager = SettingsManager(config_dir=self.temp_dir)
        self.mock_logger = MagicMock()
        self.runner = ModeRunner(self.settings_manager, self.mock_logger)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_every_mode_on_unsat_example(self):
        for mode in MODES:
            outcome = self.runner.run(UNSAT_N2, mode)
            self.assertEqual(outcome.certificate.verdict, Verdict.UNSAT, msg=mode)
            self.assertEqual(outcome.mode, mode)
            if mode in LP_MODES:
                self.assertAlmostEqual(outcome.zstar, 4)
                self.assertGreater(outcome.pivots, 0)
            else:
                self.assertIsNone(outcome.zstar)

    def test_exhaustive_n2_both_arithmetics(self):
        for arithmetic in ("float", "rational"):
            self.settings_manager.set("arithmetic", arithmetic)
            for mask in range(16):
                f = formula_from_mask(2, mask)
                verdicts = {mode: self.runner.run(f, mode).certificate.verdict for mode in MODES}
                self.assertEqual(len(set(verdicts.values())), 1, msg=f"{arithmetic} mask {mask}: {verdicts}")

    def test_n3_stride_subset(self):
        for mask in range(0, 2 ** 12, 97):
            f = formula_from_mask(3, mask)
            expected = self.runner.run(f, "apt").certificate.verdict
            for mode in LP_MODES:
                self.assertEqual(self.runner.run(f, mode).certificate.verdict, expected, msg=f"{mode} mask {mask}")

    def test_random_larger_instances(self):
        for n in (4, 6, 8, 12):
            for seed in range(2):
                f = random_formula(n, 0.06, seed)
                expected = self.runner.run(f, "apt").certificate.verdict
                self.assertEqual(self.runner.run(f, "lp").certificate.verdict, expected)
                if n <= 8:
                    self.assertEqual(self.runner.run(f, "lp-decomposed").certificate.verdict, expected)

    def test_source_capacity_setting(self):
        self.settings_manager.set("capacity_mode", "sources")
        outcome = self.runner.run(UNSAT_N2, "lp")
        self.assertEqual(outcome.certificate.verdict, Verdict.UNSAT)

    def test_rational_zstar_is_exact(self):
        self.settings_manager.set("arithmetic", "rational")
        outcome = self.runner.run(Formula.of(2, [(1, 2)]), "lp")
        self.assertEqual(format_zstar(outcome.zstar), "0")

    def test_unknown_mode(self):
        with self.assertRaises(TwoSatLpError):
            self.runner.run(UNSAT_N2, "simulated-annealing")

    @patch('src.runner.solve')
    def test_non_optimal_solve_raises(self, mock_solve):
        mock_solve.return_value = MagicMock(optimal=False, status=SolveStatus.ITERATION_LIMIT, pivots=3)
        with self.assertRaises(SolverError):
            self.runner.run(UNSAT_N2, "lp")

    @patch('src.runner.apt_decide')
    def test_failed_verification_raises(self, mock_apt):
        mock_apt.return_value = Certificate.sat((False, False))
        with self.assertRaises(TwoSatLpError):
            self.runner.run(UNSAT_N2, "apt")
        self.mock_logger.error.assert_called()

    def test_cross_check(self):
        good = self.runner.run(UNSAT_N2, "lp")
        self.assertEqual(self.runner.cross_check(UNSAT_N2, good), [])

        wrong = RunOutcome(mode="lp", certificate=Certificate.sat((True, True)))
        mismatches = self.runner.cross_check(UNSAT_N2, wrong)
        self.assertEqual(mismatches, [("apt", Verdict.UNSAT), ("brute", Verdict.UNSAT)])
        self.mock_logger.critical.assert_called()


class TestFormatZstar(unittest.TestCase):

    def test_format(self):
        self.assertEqual(format_zstar(None), "")
        self.assertEqual(format_zstar(4.0), "4")
        self.assertEqual(format_zstar(-0.5), "-0.5")


if __name__ == '__main__':
    unittest.main()
