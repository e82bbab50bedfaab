"""Unit tests for DIMACS parsing and serialisation."""

import io

import pytest
from src.core.errors import DimacsError
from src.core.logic.dimacs import parse_dimacs, parse_dimacs_file, serialize_dimacs
from src.core.logic.formula import CnfFormula, Literal


class TestParseDimacs:
    """Test cases for parse_dimacs."""

    def test_basic_instance(self):
        """Comments are skipped and literals map to zero-based ids."""
        text = "c example\np cnf 3 2\n1 -3 0\n2 3 -1 0\n"
        cnf = parse_dimacs(text)
        assert cnf.num_vars == 3
        assert cnf.clauses == ((Literal(0, 1), Literal(2, -1)), (Literal(1, 1), Literal(2, 1), Literal(0, -1)))

    def test_clause_spanning_lines(self):
        """A clause may continue over several lines until its 0."""
        cnf = parse_dimacs(b"p cnf 2 1\n1\n-2 0\n")
        assert cnf.clauses == ((Literal(0, 1), Literal(1, -1)),)

    def test_satlib_trailer(self):
        """A '%' line ends the data, as in SATLIB uf files."""
        cnf = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n%\n0\n\n")
        assert cnf.num_clauses == 2

    def test_binary_stream(self):
        """Binary file objects are accepted."""
        cnf = parse_dimacs(io.BytesIO(b"p cnf 1 1\n1 0\n"))
        assert cnf.num_clauses == 1

    def test_missing_header(self):
        """Clauses before any header are a malformed header."""
        with pytest.raises(DimacsError, match="malformed header"):
            parse_dimacs("1 2 0\n")

    def test_bad_header(self):
        """A header that is not 'p cnf' reports line 1."""
        with pytest.raises(DimacsError, match="malformed header") as exc:
            parse_dimacs("p sat 3 1\n1 0\n")
        assert exc.value.line == 1

    def test_invalid_literal(self):
        """A non-integer token is reported with its line number."""
        with pytest.raises(DimacsError, match="invalid literal 'x'") as exc:
            parse_dimacs("p cnf 2 1\n1 x 0\n")
        assert exc.value.line == 2
        assert str(exc.value).startswith("line 2: ")

    def test_variable_exceeds_header(self):
        """A literal above the declared variable count is rejected."""
        with pytest.raises(DimacsError, match="variable id exceeds header: 4 > 3"):
            parse_dimacs("p cnf 3 1\n1 4 0\n")

    def test_empty_clause(self):
        """A bare 0 is an empty clause and is rejected."""
        with pytest.raises(DimacsError, match="empty clause"):
            parse_dimacs("p cnf 2 2\n1 0\n0\n")

    def test_trailing_unterminated_clause(self):
        """Literals after the last 0 are rejected."""
        with pytest.raises(DimacsError, match="trailing non-terminated clause"):
            parse_dimacs("p cnf 2 2\n1 0\n2 -1\n")

    def test_clause_count_mismatch(self):
        """The clause count must match the header."""
        with pytest.raises(DimacsError, match="header declares 3, found 2"):
            parse_dimacs("p cnf 2 3\n1 0\n2 0\n")

    def test_normalisation_after_count_check(self):
        """Tautologies count towards the header total and are then dropped."""
        cnf = parse_dimacs("p cnf 2 3\n1 -1 0\n1 2 0\n2 1 0\n")
        assert cnf.num_clauses == 1

    def test_parse_file(self, tmp_path):
        """parse_dimacs_file reads a CNF from disk."""
        path = tmp_path / "tiny.cnf"
        path.write_text("p cnf 2 1\n-1 2 0\n")
        assert parse_dimacs_file(str(path)).clauses == ((Literal(0, -1), Literal(1, 1)),)


class TestSerializeDimacs:
    """Test cases for serialize_dimacs."""

    def test_serialize_then_parse(self):
        """Serialising and re-parsing gives the same CNF."""
        cnf = CnfFormula.from_dimacs_lists(4, [[1, -2], [3, 4, -1], [-4]])
        text = serialize_dimacs(cnf, comments=["generated"])
        assert text.splitlines()[:2] == ["c generated", "p cnf 4 3"]
        assert parse_dimacs(text) == cnf
