"""DIMACS CNF reading and writing."""
import io
import logging
from typing import BinaryIO, Iterable, List, Optional, Union

from src.core.errors import DimacsError, FormulaError
from src.core.logic.formula import CnfFormula, Literal, normalize_clauses
from src.utils.io import read_bytes

logger = logging.getLogger(__name__)

DimacsSource = Union[bytes, str, BinaryIO]


def _lines(source: DimacsSource) -> List[str]:
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        data = source.encode("utf-8")
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    return data.decode("utf-8", errors="replace").splitlines()


def parse_dimacs(source: DimacsSource) -> CnfFormula:
    """Parse a DIMACS CNF byte stream.

    Comment lines start with 'c'; a line starting with '%' ends the data
    (SATLIB files carry a '%' / '0' trailer). The clause count is checked
    against the clauses read from the file; duplicate literals are then
    merged and tautological or repeated clauses dropped with a warning.
    """
    header: Optional[tuple] = None
    raw: List[List[Literal]] = []
    origins: List[int] = []
    current: List[Literal] = []
    current_line: Optional[int] = None

    for lineno, line in enumerate(_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            if header is not None:
                raise DimacsError("malformed header: duplicate problem line", lineno)
            parts = stripped.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"malformed header: expected 'p cnf <nvars> <nclauses>', got '{stripped}'", lineno)
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header: non-integer counts in '{stripped}'", lineno)
            if nvars < 0 or nclauses < 0:
                raise DimacsError("malformed header: negative counts", lineno)
            header = (nvars, nclauses, lineno)
            continue
        if header is None:
            raise DimacsError("malformed header: clause data before 'p cnf' line", lineno)
        for token in stripped.split():
            try:
                code = int(token)
            except ValueError:
                raise DimacsError(f"invalid literal '{token}'", lineno)
            if code == 0:
                if not current:
                    raise DimacsError("empty clause", lineno)
                raw.append(current)
                origins.append(current_line)
                current, current_line = [], None
                continue
            if abs(code) > header[0]:
                raise DimacsError(f"variable id exceeds header: {abs(code)} > {header[0]}", lineno)
            if current_line is None:
                current_line = lineno
            current.append(Literal.from_dimacs(code))

    if header is None:
        raise DimacsError("malformed header: no 'p cnf' line found")
    if current:
        raise DimacsError("trailing non-terminated clause", current_line)
    nvars, nclauses, header_line = header
    if len(raw) != nclauses:
        raise DimacsError(f"clause count mismatch: header declares {nclauses}, found {len(raw)}", header_line)

    kept, notes = normalize_clauses(raw, origins)
    if not kept:
        raise DimacsError("no clauses left after normalisation", header_line)
    try:
        cnf = CnfFormula(nvars, tuple(kept))
    except FormulaError as e:
        raise DimacsError(str(e), header_line)
    if notes:
        logger.info(f"Normalised DIMACS input: {len(notes)} clause(s) dropped")
    return cnf


def parse_dimacs_file(path: str) -> CnfFormula:
    """Read and parse a DIMACS file from disk."""
    return parse_dimacs(read_bytes(path))


def serialize_dimacs(cnf: CnfFormula, comments: Iterable[str] = ()) -> str:
    """Render a CNF back to DIMACS text."""
    out = io.StringIO()
    for comment in comments:
        out.write(f"c {comment}\n")
    out.write(f"p cnf {cnf.num_vars} {cnf.num_clauses}\n")
    for clause in cnf.clauses:
        out.write(" ".join(str(lit.to_dimacs()) for lit in clause) + " 0\n")
    return out.getvalue()
