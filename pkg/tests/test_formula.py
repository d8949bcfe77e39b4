import os
import sys
import unittest
from unittest.mock import patch

# Add src to path to allow importing
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from src.formula import (
    Clause,
    DimacsError,
    Formula,
    FormulaError,
    clause_universe,
    evaluate,
    formula_from_mask,
    from_signed,
    instance_seed,
    is_tautology,
    literal_value,
    make_clause,
    negate,
    non_tautological_universe,
    parse_dimacs,
    random_formula,
    read_dimacs,
    serialize_dimacs,
    slot_index,
    to_indicator,
    to_signed,
)

UNSAT_N2 = "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n"


class TestLiterals(unittest.TestCase):

    def test_negate_is_an_involution(self):
        self.assertEqual(negate(1, 2), 3)
        self.assertEqual(negate(4, 2), 2)
        for n in (1, 2, 5):
            for code in range(1, 2 * n + 1):
                self.assertEqual(negate(negate(code, n), n), code)
                self.assertNotEqual(negate(code, n), code)

    def test_negate_rejects_out_of_range(self):
        with self.assertRaises(FormulaError):
            negate(0, 2)
        with self.assertRaises(FormulaError):
            negate(5, 2)

    def test_signed_conversion(self):
        self.assertEqual(from_signed(-1, 2), 3)
        self.assertEqual(from_signed(2, 2), 2)
        self.assertEqual(to_signed(4, 2), -2)
        with self.assertRaises(FormulaError):
            from_signed(3, 2)

    def test_make_clause_canonicalizes(self):
        self.assertEqual(make_clause(4, 1, 2), Clause(1, 4))
        with self.assertRaises(FormulaError):
            make_clause(2, 2, 2)
        with self.assertRaises(FormulaError):
            make_clause(1, 3, 2)  # x1 or not x1

    def test_literal_value(self):
        self.assertTrue(literal_value(1, (True, False), 2))
        self.assertTrue(literal_value(4, (True, False), 2))
        self.assertFalse(literal_value(3, (True, False), 2))


class TestUniverse(unittest.TestCase):

    def test_universe_sizes(self):
        for n in (1, 2, 3, 6):
            self.assertEqual(len(clause_universe(n)), 2 * n * n - n)
            self.assertEqual(len(non_tautological_universe(n)), 2 * n * n - 2 * n)
            self.assertEqual(sum(1 for c in clause_universe(n) if is_tautology(c.lo, c.hi, n)), n)

    def test_slot_index_matches_universe_position(self):
        for n in (1, 2, 3, 4):
            for position, clause in enumerate(clause_universe(n)):
                self.assertEqual(slot_index(clause, n), position)

    def test_indicator(self):
        f = Formula.of(2, [(1, 2), (3, 4)])
        indicator = to_indicator(f)
        self.assertEqual(len(indicator.bits), 6)
        self.assertEqual(indicator.popcount, 2)
        self.assertEqual(indicator.bits[slot_index(Clause(1, 2), 2)], 1)
        self.assertEqual(indicator.bits[slot_index(Clause(3, 4), 2)], 1)
        self.assertEqual(to_indicator(Formula(2)).popcount, 0)

    def test_formula_from_mask(self):
        universe = non_tautological_universe(2)
        self.assertEqual(formula_from_mask(2, 0), Formula(2))
        self.assertEqual(formula_from_mask(2, 15).clauses, tuple(universe))
        self.assertEqual(formula_from_mask(2, 0b0101).clauses, (universe[0], universe[2]))
        with self.assertRaises(FormulaError):
            formula_from_mask(2, 16)


class TestFormula(unittest.TestCase):

    def test_of_deduplicates_and_sorts(self):
        f = Formula.of(2, [(2, 1), (1, 2), (4, 3)])
        self.assertEqual(f.clauses, (Clause(1, 2), Clause(3, 4)))
        self.assertEqual(f.m, 2)
        self.assertIn((1, 2), f)
        self.assertNotIn((1, 4), f)

    def test_constructor_rejects_non_canonical(self):
        with self.assertRaises(FormulaError):
            Formula(2, (Clause(2, 1),))
        with self.assertRaises(FormulaError):
            Formula(2, (Clause(3, 4), Clause(1, 2)))
        with self.assertRaises(FormulaError):
            Formula(0)

    def test_evaluate(self):
        f = Formula.from_signed(2, [(1, 2), (-1, 2)])
        self.assertTrue(evaluate(f, (False, True)))
        self.assertFalse(evaluate(f, (True, False)))
        self.assertTrue(evaluate(Formula(3), (False, False, False)))
        with self.assertRaises(FormulaError):
            evaluate(f, (True,))


class TestDimacs(unittest.TestCase):

    def test_parse_unsat_example(self):
        f = parse_dimacs(UNSAT_N2)
        self.assertEqual(f.n, 2)
        self.assertEqual(f.clauses, (Clause(1, 2), Clause(1, 4), Clause(2, 3), Clause(3, 4)))

    def test_clauses_may_span_lines_and_comments(self):
        text = "c a comment\np cnf 3 2\n1\n-3 0 2 3\n0\n%\nignored junk\n"
        f = parse_dimacs(text)
        self.assertEqual(f.clauses, (Clause(1, 6), Clause(2, 3)))

    def test_serialize_then_parse_is_identity(self):
        f = Formula.from_signed(3, [(1, -2), (-3, 2), (1, 3)])
        text = serialize_dimacs(f)
        self.assertTrue(text.startswith("p cnf 3 3\n"))
        self.assertEqual(parse_dimacs(text), f)
        self.assertEqual(serialize_dimacs(parse_dimacs(text)), text)

    def test_unit_clause_rejected(self):
        with self.assertRaises(DimacsError) as ctx:
            parse_dimacs("p cnf 2 1\n1 0\n")
        self.assertIn("clause has 1 literal", str(ctx.exception))
        self.assertEqual(ctx.exception.line, 2)

    def test_three_literal_clause_rejected(self):
        with self.assertRaises(DimacsError) as ctx:
            parse_dimacs("p cnf 3 1\n1 2 3 0\n")
        self.assertIn("clause has 3 literals", str(ctx.exception))

    def test_variable_out_of_range(self):
        with self.assertRaises(DimacsError) as ctx:
            parse_dimacs("p cnf 2 1\n1 3 0\n")
        self.assertIn("variable 3 exceeds n=2", str(ctx.exception))

    def test_malformed_inputs(self):
        for text in ("1 2 0\n", "p cnf x 1\n", "p sat 2 1\n", "p cnf 2 1\n1 2\n", ""):
            with self.assertRaises(DimacsError):
                parse_dimacs(text)

    @patch('src.formula.get_logger')
    def test_tautologies_and_duplicates_are_counted(self, mock_get_logger):
        result = read_dimacs("p cnf 2 4\n1 -1 0\n1 2 0\n2 1 0\n-2 1 0\n")
        self.assertEqual(result.formula.clauses, (Clause(1, 2), Clause(1, 4)))
        self.assertEqual(result.declared_clauses, 4)
        self.assertEqual(result.tautologies_dropped, 1)
        self.assertEqual(result.duplicates_dropped, 1)
        mock_get_logger.return_value.warning.assert_called()

    @patch('src.formula.get_logger')
    def test_header_count_mismatch_warns(self, mock_get_logger):
        parse_dimacs("p cnf 2 5\n1 2 0\n")
        message = mock_get_logger.return_value.warning.call_args[0][0]
        self.assertIn("declares 5", message)

    def test_empty_formula(self):
        f = parse_dimacs("p cnf 4 0\n")
        self.assertEqual(f, Formula(4))


class TestRandomFormula(unittest.TestCase):

    def test_clause_count_and_determinism(self):
        f = random_formula(4, 0.5, 1234)
        self.assertEqual(f.m, 12)
        self.assertEqual(random_formula(4, 0.5, 1234), f)
        self.assertEqual(random_formula(4, 0.0, 1).m, 0)
        self.assertEqual(random_formula(3, 1.0, 7).m, 12)

    def test_density_out_of_range(self):
        with self.assertRaises(FormulaError):
            random_formula(3, 1.5, 0)

    def test_instance_seed_is_deterministic(self):
        self.assertEqual(instance_seed(0, 4, 0.3, 2), instance_seed(0, 4, 0.3, 2))
        self.assertNotEqual(instance_seed(0, 4, 0.3, 2), instance_seed(0, 4, 0.3, 3))
        self.assertNotEqual(instance_seed(0, 4, 0.3, 2), instance_seed(1, 4, 0.3, 2))


if __name__ == '__main__':
    unittest.main()
