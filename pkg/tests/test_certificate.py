import json
import os
import sys
import unittest
from dataclasses import replace

# Add src to path to allow importing
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from src.certificate import (
    Certificate,
    DecodeError,
    Verdict,
    certificate_from_json,
    certificate_to_json,
    decide_from_solution,
    extract_assignment_flow,
    extract_path,
    flow_bit,
    verify_certificate,
)
from src.formula import Formula, evaluate, formula_from_mask, random_formula
from src.implication import apt_decide
from src.lp_model import build_face_lp, build_theorem_lp
from src.lp_solver import Arithmetic, SolverOptions, SolveStatus, solve

UNSAT_N2 = Formula.from_signed(2, [(1, 2), (1, -2), (-1, 2), (-1, -2)])


class TestFlowBits(unittest.TestCase):

    def test_thresholds(self):
        self.assertEqual(flow_bit(0.0), 0)
        self.assertEqual(flow_bit(0.1), 0)
        self.assertEqual(flow_bit(0.95), 1)
        with self.assertRaises(DecodeError):
            flow_bit(0.5)


class TestDecide(unittest.TestCase):

    def test_unsat_example(self):
        sol = solve(build_theorem_lp(UNSAT_N2))
        cert = decide_from_solution(sol, UNSAT_N2)
        self.assertEqual(cert.verdict, Verdict.UNSAT)
        self.assertEqual(cert.witness, 1)
        forward, backward = cert.paths
        self.assertEqual((forward[0], forward[-1]), (1, 3))
        self.assertEqual((backward[0], backward[-1]), (3, 1))
        self.assertTrue(verify_certificate(UNSAT_N2, cert))

    def test_single_clause_is_sat(self):
        f = Formula.of(2, [(1, 2)])
        cert = decide_from_solution(solve(build_theorem_lp(f)), f)
        self.assertTrue(cert.is_sat)
        self.assertTrue(evaluate(f, cert.assignment))

    def test_exhaustive_n2_all_pipelines(self):
        rational = SolverOptions(arithmetic=Arithmetic.RATIONAL)
        for mask in range(16):
            f = formula_from_mask(2, mask)
            expected = apt_decide(f).verdict
            for build in (build_theorem_lp, build_face_lp):
                for options in (SolverOptions(), rational):
                    cert = decide_from_solution(solve(build(f), options), f)
                    self.assertEqual(cert.verdict, expected, msg=f"mask {mask}")
                    self.assertTrue(verify_certificate(f, cert))

    def test_random_instances(self):
        for n in (3, 4, 5):
            for seed in range(6):
                f = random_formula(n, 0.25, seed)
                cert = decide_from_solution(solve(build_theorem_lp(f)), f)
                self.assertEqual(cert.verdict, apt_decide(f).verdict)
                self.assertTrue(verify_certificate(f, cert))

    def test_non_optimal_solution_rejected(self):
        sol = solve(build_theorem_lp(UNSAT_N2))
        with self.assertRaises(DecodeError):
            decide_from_solution(replace(sol, status=SolveStatus.ITERATION_LIMIT), UNSAT_N2)
        with self.assertRaises(DecodeError):
            decide_from_solution(sol, Formula(3))

    def test_fractional_solution_rejected(self):
        sol = solve(build_theorem_lp(UNSAT_N2))
        primal = list(sol.primal)
        primal[0] = 0.5
        with self.assertRaises(DecodeError):
            decide_from_solution(replace(sol, primal=tuple(primal)), UNSAT_N2)


class TestExtraction(unittest.TestCase):

    def test_every_routed_commodity_yields_a_path(self):
        sol = solve(build_theorem_lp(UNSAT_N2))
        for k in range(1, 5):
            path = extract_path(sol, k, 2)
            self.assertEqual(path[0], k)
            self.assertEqual(path[-1], k + 2 if k <= 2 else k - 2)
            self.assertEqual(len(set(path)), len(path))

    def test_unrouted_commodity(self):
        f = Formula.of(2, [(1, 2)])
        with self.assertRaises(DecodeError):
            extract_path(solve(build_theorem_lp(f)), 1, 2)

    def test_assignment_respects_routed_literals(self):
        # x1 -> not x1 is forced, so x1 must come out false
        f = Formula.from_signed(3, [(-1, 2), (-2, -1), (2, 3)])
        sol = solve(build_theorem_lp(f))
        assignment = extract_assignment_flow(sol, f)
        self.assertFalse(assignment[0])
        self.assertTrue(evaluate(f, assignment))


class TestVerify(unittest.TestCase):

    def test_rejects_wrong_assignment(self):
        f = Formula.of(2, [(1, 2)])
        self.assertFalse(verify_certificate(f, Certificate.sat((False, False))))
        self.assertFalse(verify_certificate(f, Certificate.sat((True,))))

    def test_rejects_bad_paths(self):
        cert = apt_decide(UNSAT_N2)
        self.assertFalse(verify_certificate(UNSAT_N2, Certificate.unsat(1)))
        self.assertFalse(verify_certificate(UNSAT_N2, Certificate.unsat(1, [1, 3], cert.paths[1])))
        self.assertFalse(verify_certificate(Formula.of(2, [(1, 2)]), cert))


class TestJson(unittest.TestCase):

    def test_sat_schema(self):
        text = certificate_to_json(Certificate.sat((True, False)), 2)
        self.assertEqual(json.loads(text), {"verdict": "SAT", "n": 2, "assignment": [1, 0]})
        cert, n = certificate_from_json(text)
        self.assertEqual(n, 2)
        self.assertEqual(cert.assignment, (True, False))

    def test_unsat_schema(self):
        cert = apt_decide(UNSAT_N2)
        record = json.loads(certificate_to_json(cert, 2))
        self.assertEqual(record["verdict"], "UNSAT")
        self.assertEqual(record["witness"], 1)
        self.assertEqual(len(record["paths"]), 2)
        parsed, _ = certificate_from_json(json.dumps(record))
        self.assertEqual(parsed, cert)

    def test_malformed(self):
        for text in ("not json", "{}", '{"verdict": "MAYBE", "n": 2}', '{"verdict": "SAT", "n": 2}'):
            with self.assertRaises(DecodeError):
                certificate_from_json(text)

    def test_field_types_are_checked(self):
        bad = [
            '[1, 2]',
            '{"verdict": "UNSAT", "n": 2, "witness": "1", "paths": [[1, 3], [3, 1]]}',
            '{"verdict": "UNSAT", "n": 2, "witness": true}',
            '{"verdict": "UNSAT", "n": 2, "witness": 1, "paths": [[1, "3"], [3, 1]]}',
            '{"verdict": "UNSAT", "n": 2, "witness": 1, "paths": [[1, 3]]}',
            '{"verdict": "UNSAT", "n": 2, "witness": 1, "paths": "1 3"}',
            '{"verdict": "SAT", "n": 2, "assignment": [1, 2]}',
            '{"verdict": "SAT", "n": 2, "assignment": ["1", "0"]}',
            '{"verdict": "SAT", "n": "2", "assignment": [1, 0]}',
            '{"verdict": "SAT", "n": 0, "assignment": []}',
        ]
        for text in bad:
            with self.subTest(text=text):
                with self.assertRaises(DecodeError):
                    certificate_from_json(text)

    def test_unsat_without_paths_parses(self):
        cert, n = certificate_from_json('{"verdict": "UNSAT", "n": 2, "witness": 1}')
        self.assertEqual((cert.witness, cert.paths, n), (1, None, 2))
        self.assertFalse(verify_certificate(Formula.of(2, [(1, 2)]), cert))


if __name__ == '__main__':
    unittest.main()
