"""Unit tests for the sparse Gödel backward pass and the dense baselines."""

import itertools

import numpy as np
import pytest
from src.core.errors import GradientError, PathError, RepresentationError
from src.core.logic.formula import And, CnfFormula, Literal, Not, Or, Var
from src.core.logic.generators import random_cnf, random_formula, random_nonzero_logits
from src.core.logic.gradient import (Path, SparseGrad, backward_cnf_godel, backward_cnf_lukasiewicz,
                                     backward_cnf_product, backward_godel, candidate_path_necessary,
                                     check_implicit_gradient_law, construct_representation,
                                     dense_from_sparse)
from src.core.logic.semantics import (CnfGodelEval, eval_cnf_godel, eval_cnf_product, eval_godel,
                                      godel_cnf_batch, signs)


@pytest.fixture
def example_formula():
    """(A or B) and not C."""
    return And((Or((Var(0), Var(1))), Not(Var(2))))


@pytest.fixture
def example_logits():
    return np.array([-2.3, 3.1, 1.5])


class TestPath:
    """Test cases for Path."""

    def test_negation_counts(self, example_formula):
        """Negations are counted per prefix along the path."""
        path = Path.from_steps(example_formula, (1, 0))
        assert path.end == Var(2)
        assert path.negation_counts == (0, 0, 1)
        assert list(path.prefix_positions()) == [(), (1,), (1, 0)]

    def test_invalid_step(self, example_formula):
        """A step past a node's children raises PathError."""
        with pytest.raises(PathError):
            Path.from_steps(example_formula, (0, 2))

    def test_sparse_grad_checks_direction(self, example_formula):
        """The direction must match the variable and parity of the path."""
        path = Path.from_steps(example_formula, (1, 0))
        with pytest.raises(GradientError):
            SparseGrad(var=2, direction=1, path=path)
        with pytest.raises(GradientError):
            SparseGrad(var=0, direction=-1, path=path)


class TestBackwardGodel:
    """Test cases for the sparse backward pass."""

    def test_example_reaches_c(self, example_formula, example_logits):
        """The active path ends at C through the negation."""
        grad = backward_godel(example_formula, eval_godel(example_formula, example_logits))
        assert (grad.var, grad.direction) == (2, -1)
        assert grad.path.steps == (1, 0)

    def test_dense_has_single_unit_entry(self):
        """Across random formulas the gradient has exactly one ±1 entry."""
        rng = np.random.default_rng(7)
        for _ in range(200):
            f = random_formula(rng, 6, 4)
            x = random_nonzero_logits(rng, f.num_vars)
            dense = dense_from_sparse(backward_godel(f, eval_godel(f, x)), f.num_vars)
            assert np.count_nonzero(dense) == 1
            assert np.abs(dense).sum() == 1.0

    def test_implicit_gradient_law(self, example_formula, example_logits):
        """The gradient sign follows the implicit interpretation."""
        grad = backward_godel(example_formula, eval_godel(example_formula, example_logits))
        assert check_implicit_gradient_law(example_formula, example_logits, grad) is True

    def test_mismatched_evaluation(self, example_formula, example_logits):
        """An evaluation of another formula is rejected."""
        ev = eval_godel(Or((Var(0), Var(1))), example_logits)
        with pytest.raises(GradientError):
            backward_godel(example_formula, ev)

    def test_cnf_backward_matches_tree(self, example_logits):
        """The CNF kernel picks the same path as the tree pass."""
        cnf = CnfFormula.from_dimacs_lists(3, [[1, 2], [-3]])
        grad = backward_cnf_godel(cnf, eval_cnf_godel(cnf, example_logits))
        assert (grad.var, grad.direction) == (2, -1)
        tree = backward_godel(cnf.formula, eval_godel(cnf.formula, example_logits))
        assert grad.path.steps == tree.path.steps


class TestCandidatePaths:
    """Test cases for candidate_path_necessary."""

    def test_negation_above_excludes_path(self):
        """not(A or B) and (B or C) and (C or D) with A false: the path to A is never active."""
        f = And((Not(Or((Var(0), Var(1)))), Or((Var(1), Var(2))), Or((Var(2), Var(3)))))
        path = Path.from_steps(f, (0, 0, 0))
        assert candidate_path_necessary(f, [-1, 1, -1, 1], path) is False

    def test_active_path_is_candidate(self, example_formula, example_logits):
        """The active path satisfies the candidate conditions."""
        grad = backward_godel(example_formula, eval_godel(example_formula, example_logits))
        assert candidate_path_necessary(example_formula, signs(example_logits), grad.path) is True

    def test_observed_active_paths_are_candidates(self):
        """Every CNF over three variables with up to three clauses, on a grid of logits."""
        clauses = [[sign * (v + 1) for v, sign in zip(subset, signs_)]
                   for size in (1, 2, 3)
                   for subset in itertools.combinations(range(3), size)
                   for signs_ in itertools.product((1, -1), repeat=size)]
        grid = np.array(list(itertools.product((-3.0, -2.0, -1.0, 1.0, 2.0, 3.0), repeat=3)))
        checked = 0
        for count in (1, 2, 3):
            for combo in itertools.combinations(clauses, count):
                cnf = CnfFormula.from_dimacs_lists(3, combo)
                f = cnf.formula
                batch = godel_cnf_batch(cnf.clause_arrays, grid)
                seen = set()
                for row in range(grid.shape[0]):
                    key = (tuple(signs(grid[row])), int(batch.min_clause[row]),
                           tuple(int(i) for i in batch.best_literal[row]))
                    if key in seen:
                        continue
                    seen.add(key)
                    ev = CnfGodelEval(root=float(batch.root[row]), min_clause=key[1],
                                      max_literal_per_clause=key[2],
                                      clause_values=tuple(float(v) for v in batch.clause_values[row]))
                    path = backward_cnf_godel(cnf, ev).path
                    assert candidate_path_necessary(f, key[0], path), (combo, key)
                    checked += 1
        assert checked > 10_000

    def test_foreign_path(self, example_formula):
        """A path built on another formula raises PathError."""
        path = Path.from_steps(Or((Var(0), Var(1))), (0,))
        with pytest.raises(PathError):
            candidate_path_necessary(example_formula, [1, 1, 1], path)


class TestConstructRepresentation:
    """Test cases for construct_representation."""

    def test_worked_example(self):
        """(A or B) and (not B or C), all false, clause 0 through A."""
        cnf = CnfFormula.from_dimacs_lists(3, [[1, 2], [-2, 3]])
        logits = construct_representation(cnf, [-1, -1, -1], 0, Literal(0, 1))
        np.testing.assert_allclose(logits, [-2.0, -3.0, -4.0])
        grad = backward_cnf_godel(cnf, eval_cnf_godel(cnf, logits))
        assert grad.var == 0
        assert grad.path.steps[0] == 0

    def test_literal_by_position(self):
        """A literal given by position in its clause is the one that moves."""
        cnf = CnfFormula.from_dimacs_lists(3, [[1, 2], [-2, 3]])
        logits = construct_representation(cnf, [-1, -1, -1], 0, 1)
        assert backward_cnf_godel(cnf, eval_cnf_godel(cnf, logits)).var == 1

    def test_random_instances_hit_requested_literal(self):
        """Constructed logits steer the gradient to the chosen literal."""
        rng = np.random.default_rng(3)
        hits = 0
        for _ in range(100):
            cnf = random_cnf(rng, 6, 10)
            b = rng.choice((-1, 1), size=6)
            for c, clause in enumerate(cnf.clauses):
                if any(l.polarity * b[l.var] > 0 for l in clause):
                    continue
                try:
                    logits = construct_representation(cnf, b, c, clause[0])
                except RepresentationError:
                    continue
                assert list(signs(logits)) == list(b)
                grad = backward_cnf_godel(cnf, eval_cnf_godel(cnf, logits))
                assert grad.var == clause[0].var
                hits += 1
        assert hits > 0

    def test_satisfied_clause(self):
        """A clause the assignment satisfies is refused."""
        cnf = CnfFormula.from_dimacs_lists(2, [[1, 2]])
        with pytest.raises(RepresentationError, match="clause not unsatisfied"):
            construct_representation(cnf, [1, -1], 0, 0)

    def test_irrelevant_clause(self):
        """A subsumed clause is refused."""
        cnf = CnfFormula.from_dimacs_lists(3, [[1, 2, 3], [1, 2]])
        with pytest.raises(RepresentationError, match="clause not relevant"):
            construct_representation(cnf, [-1, -1, -1], 0, 0)

    def test_constant_order(self):
        """Constants out of order are refused."""
        cnf = CnfFormula.from_dimacs_lists(1, [[1]])
        with pytest.raises(RepresentationError, match="constants"):
            construct_representation(cnf, [-1], 0, 0, alpha=-4.0)

    def test_literal_not_in_clause(self):
        """A literal outside the clause is refused."""
        cnf = CnfFormula.from_dimacs_lists(2, [[1], [2]])
        with pytest.raises(RepresentationError, match="literal not in clause"):
            construct_representation(cnf, [-1, -1], 0, Literal(1, 1))


def _finite_difference(fn, x, h=1e-6):
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (fn(up) - fn(down)) / (2 * h)
    return grad


class TestDenseBaselines:
    """Test cases for the Product and Łukasiewicz gradients."""

    def test_product_single_literal(self):
        """d log sigmoid(x) / dx at 0 is 0.5."""
        cnf = CnfFormula.from_dimacs_lists(1, [[1]])
        assert backward_cnf_product(cnf, [0.0])[0] == pytest.approx(0.5)

    def test_product_two_literal_clause(self):
        """d log(1 - (1 - s)^2) / dx at 0 is 0.5 * 0.25 / 0.75 for each literal."""
        cnf = CnfFormula.from_dimacs_lists(2, [[1, 2]])
        np.testing.assert_allclose(backward_cnf_product(cnf, [0.0, 0.0]), [1 / 6, 1 / 6])

    def test_product_certain_clause_flat(self):
        """A clause that is almost surely true has no gradient."""
        cnf = CnfFormula.from_dimacs_lists(1, [[1]])
        assert abs(backward_cnf_product(cnf, [40.0])[0]) < 1e-12

    def test_product_matches_finite_differences(self):
        """The analytic gradient agrees with central differences."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            cnf = random_cnf(rng, 5, 8)
            x = rng.uniform(-2, 2, 5)
            numeric = _finite_difference(lambda v: eval_cnf_product(cnf, v)[0], x)
            np.testing.assert_allclose(backward_cnf_product(cnf, x), numeric, rtol=1e-5, atol=1e-7)

    def test_lukasiewicz_unclamped(self):
        """Inside the linear region the gradient is -sigmoid'(0)."""
        cnf = CnfFormula.from_dimacs_lists(1, [[-1]])
        assert backward_cnf_lukasiewicz(cnf, [0.0])[0] == pytest.approx(-0.25)

    def test_lukasiewicz_clamped_regions(self):
        """Clauses at 1 and formulas at 0 pass no gradient."""
        saturated = CnfFormula.from_dimacs_lists(2, [[1, 2]])
        assert not np.any(backward_cnf_lukasiewicz(saturated, [3.0, 3.0]))
        dead = CnfFormula.from_dimacs_lists(2, [[1], [2]])
        assert not np.any(backward_cnf_lukasiewicz(dead, [-3.0, -3.0]))
