"""Unit tests for formulas, CNFs and clause analysis."""

import numpy as np
import pytest
from src.core.errors import FormulaError
from src.core.logic.formula import (And, CnfFormula, Literal, Not, Or, Var, cnf_to_formula, conjunction,
                                    disjunction, format_formula, is_relevant_clause, normalize_clauses,
                                    parse_formula)
from src.core.logic.generators import random_cnf
from src.core.logic.semantics import bool_cnf_satisfied, eval_bool_batch
from src.core.oracle.brute_force import brute_force_sat, enumerate_assignments


class TestFormulaTree:
    """Test cases for formula nodes."""

    def test_num_vars_and_variables(self):
        """num_vars is one past the largest id in the tree."""
        f = And((Or((Var(0), Var(3))), Not(Var(1))))
        assert f.num_vars == 4
        assert f.variables() == frozenset({0, 1, 3})

    def test_subformula_by_position(self):
        """Positions index children from the root."""
        f = And((Or((Var(0), Var(1))), Not(Var(2))))
        assert f.subformula(()) is f
        assert f.subformula((1, 0)) == Var(2)
        with pytest.raises(FormulaError):
            f.subformula((2,))

    def test_positions_preorder(self):
        """positions() walks parents before children, left to right."""
        f = Or((Var(0), Not(Var(1))))
        assert [pos for pos, _ in f.positions()] == [(), (0,), (1,), (1, 0)]
        assert f.size == 4

    def test_nary_needs_two_children(self):
        """And/Or reject a single child; the factories collapse it."""
        with pytest.raises(FormulaError):
            And((Var(0),))
        assert conjunction([Var(2)]) == Var(2)
        assert disjunction([Var(0), Var(1)]) == Or((Var(0), Var(1)))

    def test_negative_variable_rejected(self):
        """Variable ids must be non-negative."""
        with pytest.raises(FormulaError):
            Var(-1)


class TestCnfFormula:
    """Test cases for CNF construction and validation."""

    def test_build_from_pairs(self):
        """(var, polarity) pairs become literals."""
        cnf = CnfFormula.build(3, [[(0, 1), (1, 1)], [(1, -1), (2, 1)]])
        assert cnf.num_clauses == 2
        assert cnf.num_literals == 4
        assert cnf.clauses[1][0] == Literal(1, -1)

    def test_variable_out_of_range(self):
        """Literals must reference declared variables."""
        with pytest.raises(FormulaError, match="references variable 3"):
            CnfFormula(3, ((Literal(3, 1),),))

    def test_empty_clause_rejected(self):
        """Empty clauses are rejected."""
        with pytest.raises(FormulaError, match="empty"):
            CnfFormula(2, ((Literal(0, 1),), ()))

    def test_complementary_literals_rejected(self):
        """The raw constructor refuses tautologies; build() drops them instead."""
        with pytest.raises(FormulaError, match="complementary"):
            CnfFormula(1, ((Literal(0, 1), Literal(0, -1)),))
        cnf = CnfFormula.build(2, [[(0, 1), (0, -1)], [(1, 1)]])
        assert cnf.num_clauses == 1

    def test_no_clauses_rejected(self):
        """A CNF needs at least one clause."""
        with pytest.raises(FormulaError):
            CnfFormula(2, ())

    def test_cnf_to_formula_collapses_unary(self):
        """Single-literal clauses become literals; a single clause is not wrapped in And."""
        cnf = CnfFormula.from_dimacs_lists(3, [[1, 2], [-3]])
        assert cnf_to_formula(cnf) == And((Or((Var(0), Var(1))), Not(Var(2))))
        single = CnfFormula.from_dimacs_lists(2, [[1, -2]])
        assert single.formula == Or((Var(0), Not(Var(1))))

    def test_clause_arrays_padding(self):
        """Short clauses are padded with a False mask and polarity 0."""
        arrays = CnfFormula.from_dimacs_lists(3, [[1, -2, 3], [2]]).clause_arrays
        assert arrays.var_idx.shape == (2, 3)
        assert list(arrays.polarity[0]) == [1.0, -1.0, 1.0]
        assert list(arrays.mask[1]) == [True, False, False]

    def test_literal_dimacs_codes(self):
        """Literals convert to and from signed DIMACS codes."""
        assert Literal.from_dimacs(-4) == Literal(3, -1)
        assert Literal(0, 1).to_dimacs() == 1
        assert Literal(2, 1).negate() == Literal(2, -1)
        with pytest.raises(FormulaError):
            Literal.from_dimacs(0)


class TestNormalizeClauses:
    """Test cases for clause normalisation."""

    def test_duplicates_tautologies_and_repeats(self):
        """Duplicate literals merge, tautologies and repeated clauses are dropped with notes."""
        a, b = Literal(0, 1), Literal(1, 1)
        raw = [[a, a, b], [a, a.negate()], [b, a]]
        kept, notes = normalize_clauses(raw, origins=[3, 4, 5])
        assert kept == [(a, b)]
        assert notes == ["line 4: tautological clause dropped", "line 5: repeated clause dropped"]


class TestRelevantClause:
    """Test cases for is_relevant_clause."""

    def test_subsumed_clause_irrelevant(self):
        """(A or B or C) and (A or B): the longer clause is irrelevant."""
        cnf = CnfFormula.from_dimacs_lists(3, [[1, 2, 3], [1, 2]])
        assert is_relevant_clause(cnf, 0) is False
        assert is_relevant_clause(cnf, 1) is True

    def test_identical_copy_keeps_first(self):
        """With duplicate clauses only the later copy is irrelevant."""
        a, b = Literal(0, 1), Literal(1, -1)
        cnf = CnfFormula(2, ((a, b), (b, a)))
        assert is_relevant_clause(cnf, 0) is True
        assert is_relevant_clause(cnf, 1) is False

    def test_index_out_of_range(self):
        """A clause index past the end raises FormulaError."""
        cnf = CnfFormula.from_dimacs_lists(1, [[1]])
        with pytest.raises(FormulaError):
            is_relevant_clause(cnf, 1)


class TestSExpressions:
    """Test cases for parse_formula / format_formula."""

    def test_parse_assigns_ids_by_first_occurrence(self):
        """Variable ids follow the order names first appear."""
        f, names = parse_formula("(and (or A B) (not C))")
        assert names == ["A", "B", "C"]
        assert f == And((Or((Var(0), Var(1))), Not(Var(2))))

    def test_unary_and_collapses(self):
        """An 'and' with one child parses to the child."""
        f, _ = parse_formula("(and X)")
        assert f == Var(0)

    def test_format_round_trip(self):
        """Formatting a parsed formula gives back the text."""
        text = "(and (or A (not B)) C)"
        f, names = parse_formula(text)
        assert format_formula(f, names) == text
        assert str(f) == text

    def test_errors_carry_offsets(self):
        """Syntax errors name what went wrong and where."""
        with pytest.raises(FormulaError, match="offset 1"):
            parse_formula("(xor A B)")
        with pytest.raises(FormulaError, match="trailing input"):
            parse_formula("A B")
        with pytest.raises(FormulaError, match="unterminated"):
            parse_formula("(or A B")
        with pytest.raises(FormulaError, match="exactly one"):
            parse_formula("(not A B)")

    def test_fixed_names(self):
        """A given name list fixes ids and rejects other names."""
        f, names = parse_formula("(or q p)", names=["p", "q"])
        assert f == Or((Var(1), Var(0)))
        with pytest.raises(FormulaError, match="unknown variable"):
            parse_formula("(or r p)", names=["p", "q"])


class TestCnfProperties:
    """Randomised checks of the CNF-to-tree conversion and clause relevance."""

    def test_cnf_to_formula_preserves_models(self):
        """Clause-wise and tree evaluation agree on every assignment."""
        rng = np.random.default_rng(17)
        for _ in range(30):
            n = int(rng.integers(1, 11))
            cnf = random_cnf(rng, n, int(rng.integers(1, 3 * n + 1)), max_len=min(3, n))
            tree = cnf_to_formula(cnf)
            for block in enumerate_assignments(n):
                clause_wise = bool_cnf_satisfied(cnf.clause_arrays, block.astype(np.float64))
                np.testing.assert_array_equal(eval_bool_batch(tree, block) > 0, clause_wise)
            by_clauses = brute_force_sat(cnf)
            by_tree = brute_force_sat(tree, num_vars=n)
            if by_clauses is None:
                assert by_tree is None
            else:
                np.testing.assert_array_equal(by_tree, by_clauses)

    def test_relevance_matches_subset_loop(self):
        """is_relevant_clause agrees with a literal-by-literal subset search."""
        rng = np.random.default_rng(29)
        for _ in range(100):
            cnf = random_cnf(rng, 5, int(rng.integers(2, 12)), max_len=3)
            for i, clause in enumerate(cnf.clauses):
                subsumed = False
                for j, other in enumerate(cnf.clauses):
                    if j != i and all(lit in clause for lit in other):
                        subsumed = True
                assert is_relevant_clause(cnf, i) is (not subsumed)
