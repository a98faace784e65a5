"""Free-format MPS reader and canonical writer.

Reads whitespace-delimited MPS (fixed-column files parse as a byproduct):
NAME, OBJSENSE, ROWS, COLUMNS (with INTORG/INTEND markers), RHS, RANGES,
BOUNDS, ENDATA. RANGES rows are expanded into a pair of inequality rows,
so the in-memory model only ever carries LE/GE/EQ senses.

Conventions honoured:
- objective sense defaults to minimize when no OBJSENSE section exists;
- continuous default bounds are [0, +inf);
- a marker-integer variable with no BOUNDS entry gets [0, 1] and is
  classified binary; any explicit bound entry switches it to the normal
  defaults (lower 0, upper +inf);
- an integer variable whose final bounds lie inside [0, 1] is binary.
"""

from __future__ import annotations

import numpy as np

from .model import BINARY, CONTINUOUS, EQ, GE, INF, INTEGER, LE, MAXIMIZE, MINIMIZE, MipProblem, Row

_SECTION_ORDER = ["NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"]
_ROW_SENSE = {"L": LE, "G": GE, "E": EQ}
_SENSE_CHAR = {LE: "L", GE: "G", EQ: "E"}
_BOUND_TYPES_WITH_VALUE = {"UP", "LO", "FX", "UI", "LI"}
_BOUND_TYPES_NO_VALUE = {"FR", "MI", "PL", "BV"}


class MpsParseError(ValueError):
    """Malformed MPS input; message carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _num(lineno, token):
    try:
        return float(token)
    except ValueError:
        raise MpsParseError(lineno, f"expected a number, got {token!r}") from None


def parse_mps(text: str, name: str = "") -> MipProblem:
    """Parse free-format MPS text into a MipProblem."""
    problem_name = name
    sense = MINIMIZE
    obj_row = None
    obj_lineno = None
    row_order: list[str] = []
    row_sense: dict[str, str] = {}
    row_rhs: dict[str, float] = {}
    row_range: dict[str, float] = {}
    row_coeffs: dict[str, dict[int, float]] = {}
    var_index: dict[str, int] = {}
    var_names: list[str] = []
    obj_coef: dict[int, float] = {}
    marker_integer: list[bool] = []
    explicit_bound: set[int] = set()
    # bound entries applied after COLUMNS, in file order
    bound_entries: list[tuple[int, str, int, float | None]] = []

    section = None
    section_pos = -1
    in_integer_block = False
    ended = False

    def enter(lineno, name_):
        nonlocal section, section_pos
        pos = _SECTION_ORDER.index(name_)
        if pos <= section_pos:
            raise MpsParseError(lineno, f"section {name_} out of order")
        section, section_pos = name_, pos

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if ended:
            break
        stripped = raw.strip()
        if not stripped or stripped.startswith("*"):
            continue
        tokens = stripped.split()
        head = tokens[0].upper()

        # Section headers: NAME/OBJSENSE may carry a value; the rest stand alone.
        if head == "NAME":
            enter(lineno, "NAME")
            if len(tokens) > 1:
                problem_name = tokens[1]
            continue
        if head == "OBJSENSE":
            enter(lineno, "OBJSENSE")
            if len(tokens) > 1:
                sense = _parse_sense(lineno, tokens[1])
                section = None  # value consumed inline
            continue
        if head == "ENDATA" and len(tokens) == 1:
            ended = True
            continue
        if head in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS") and len(tokens) == 1:
            enter(lineno, head)
            continue

        if section is None:
            raise MpsParseError(lineno, f"data line before any section: {stripped!r}")

        if section == "OBJSENSE":
            sense = _parse_sense(lineno, tokens[0])
            section = None
            continue

        if section == "ROWS":
            if len(tokens) != 2:
                raise MpsParseError(lineno, f"ROWS line needs 'sense name', got {stripped!r}")
            kind, rname = tokens[0].upper(), tokens[1]
            if kind == "N":
                if obj_row is not None:
                    raise MpsParseError(
                        lineno,
                        f"duplicate objective row {rname!r} (objective already "
                        f"declared at line {obj_lineno})",
                    )
                obj_row, obj_lineno = rname, lineno
            elif kind in _ROW_SENSE:
                if rname in row_sense:
                    raise MpsParseError(lineno, f"duplicate row name {rname!r}")
                row_order.append(rname)
                row_sense[rname] = _ROW_SENSE[kind]
                row_coeffs[rname] = {}
            else:
                raise MpsParseError(lineno, f"unknown row sense {tokens[0]!r}")
            continue

        if section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1] == "'MARKER'":
                if tokens[2] == "'INTORG'":
                    in_integer_block = True
                elif tokens[2] == "'INTEND'":
                    in_integer_block = False
                else:
                    raise MpsParseError(lineno, f"unknown marker {tokens[2]!r}")
                continue
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise MpsParseError(lineno, "COLUMNS line needs 'var (row value)+' pairs")
            vname = tokens[0]
            if vname not in var_index:
                var_index[vname] = len(var_names)
                var_names.append(vname)
                marker_integer.append(in_integer_block)
            j = var_index[vname]
            for rname, vtok in zip(tokens[1::2], tokens[2::2]):
                value = _num(lineno, vtok)
                if rname == obj_row:
                    obj_coef[j] = obj_coef.get(j, 0.0) + value
                elif rname in row_coeffs:
                    row_coeffs[rname][j] = row_coeffs[rname].get(j, 0.0) + value
                else:
                    raise MpsParseError(lineno, f"COLUMNS references undeclared row {rname!r}")
            continue

        if section in ("RHS", "RANGES"):
            entries = tokens[1:] if len(tokens) % 2 == 1 else tokens  # optional set name
            if len(entries) < 2:
                raise MpsParseError(lineno, f"{section} line has no row/value pairs")
            for rname, vtok in zip(entries[0::2], entries[1::2]):
                value = _num(lineno, vtok)
                if rname == obj_row:
                    continue  # objective-row constant: not part of the model
                if rname not in row_sense:
                    raise MpsParseError(lineno, f"{section} references undeclared row {rname!r}")
                if section == "RHS":
                    row_rhs[rname] = value
                else:
                    row_range[rname] = value
            continue

        if section == "BOUNDS":
            btype = tokens[0].upper()
            if btype in _BOUND_TYPES_WITH_VALUE:
                if len(tokens) == 4:
                    vname, vtok = tokens[2], tokens[3]
                elif len(tokens) == 3:  # bound-set name omitted
                    vname, vtok = tokens[1], tokens[2]
                else:
                    raise MpsParseError(lineno, f"bad BOUNDS line {stripped!r}")
                value = _num(lineno, vtok)
            elif btype in _BOUND_TYPES_NO_VALUE:
                if len(tokens) == 3:
                    vname = tokens[2]
                elif len(tokens) == 2:
                    vname = tokens[1]
                else:
                    raise MpsParseError(lineno, f"bad BOUNDS line {stripped!r}")
                value = None
            else:
                raise MpsParseError(lineno, f"unknown bound type {tokens[0]!r}")
            if vname not in var_index:
                raise MpsParseError(lineno, f"BOUNDS references undeclared variable {vname!r}")
            j = var_index[vname]
            explicit_bound.add(j)
            bound_entries.append((lineno, btype, j, value))
            continue

        raise MpsParseError(lineno, f"unexpected line in section {section}: {stripped!r}")

    if section_pos < _SECTION_ORDER.index("COLUMNS"):
        raise MpsParseError(lineno if text else 0, "missing COLUMNS section")

    n = len(var_names)
    lower = np.zeros(n)
    upper = np.full(n, INF)
    integer = list(marker_integer)
    # Marker-integer variables untouched by BOUNDS default to binary [0, 1].
    for j in range(n):
        if marker_integer[j] and j not in explicit_bound:
            upper[j] = 1.0
    for lineno, btype, j, value in bound_entries:
        if btype == "UP":
            upper[j] = value
        elif btype == "LO":
            lower[j] = value
        elif btype == "FX":
            lower[j] = upper[j] = value
        elif btype == "FR":
            lower[j], upper[j] = -INF, INF
        elif btype == "MI":
            lower[j] = -INF
        elif btype == "PL":
            upper[j] = INF
        elif btype == "BV":
            integer[j] = True
            lower[j], upper[j] = 0.0, 1.0
        elif btype == "UI":
            integer[j] = True
            upper[j] = value
        elif btype == "LI":
            integer[j] = True
            lower[j] = value

    kinds = []
    for j in range(n):
        if not integer[j]:
            kinds.append(CONTINUOUS)
        elif lower[j] >= 0 and upper[j] <= 1:
            kinds.append(BINARY)
        else:
            kinds.append(INTEGER)

    objective = np.zeros(n)
    for j, v in obj_coef.items():
        objective[j] = v

    rows = []
    extra = []
    for rname in row_order:
        coeffs = sorted(row_coeffs[rname].items())
        rsense = row_sense[rname]
        rhs = row_rhs.get(rname, 0.0)
        rng = row_range.get(rname)
        if rng is None or rng == 0.0:
            rows.append(Row(rname, coeffs, rsense, rhs))
            continue
        # RANGES expansion: the row becomes a two-sided constraint realised
        # as the original inequality plus an appended partner row.
        if rsense == LE:
            rows.append(Row(rname, coeffs, LE, rhs))
            extra.append(Row(rname + "_rng", list(coeffs), GE, rhs - abs(rng)))
        elif rsense == GE:
            rows.append(Row(rname, coeffs, GE, rhs))
            extra.append(Row(rname + "_rng", list(coeffs), LE, rhs + abs(rng)))
        else:  # EQ splits into its two sides
            lo = rhs + min(rng, 0.0)
            hi = rhs + max(rng, 0.0)
            rows.append(Row(rname, coeffs, GE, lo))
            extra.append(Row(rname + "_rng", list(coeffs), LE, hi))
    rows.extend(extra)

    return MipProblem(
        name=problem_name,
        sense=sense,
        objective=objective,
        rows=rows,
        lower=lower,
        upper=upper,
        kinds=kinds,
        var_names=var_names,
    )


def _parse_sense(lineno, token):
    t = token.upper()
    if t in ("MAX", "MAXIMIZE"):
        return MAXIMIZE
    if t in ("MIN", "MINIMIZE"):
        return MINIMIZE
    raise MpsParseError(lineno, f"unknown objective sense {token!r}")


def parse_mps_file(path) -> MipProblem:
    with open(path) as fh:
        return parse_mps(fh.read())


def _fmt(value: float) -> str:
    return repr(float(value))


def write_mps(problem: MipProblem) -> str:
    """Serialize to the same free-format dialect parse_mps reads.

    parse(write(parse(text))) reproduces the parse exactly; kinds survive
    because binary-vs-integer classification is a function of the marker
    plus the written bounds.
    """
    obj_name = "OBJ"
    taken = {row.name for row in problem.rows}
    while obj_name in taken:
        obj_name += "_"

    out = [f"NAME {problem.name}".rstrip()]
    if problem.sense == MAXIMIZE:
        out.append("OBJSENSE")
        out.append("    MAX")
    out.append("ROWS")
    out.append(f" N  {obj_name}")
    for row in problem.rows:
        out.append(f" {_SENSE_CHAR[row.sense]}  {row.name}")

    by_var: dict[int, list[tuple[str, float]]] = {j: [] for j in range(problem.num_vars)}
    for j in range(problem.num_vars):
        if problem.objective[j] != 0.0:
            by_var[j].append((obj_name, problem.objective[j]))
    for row in problem.rows:
        for j, coef in row.coeffs:
            by_var[j].append((row.name, coef))

    out.append("COLUMNS")
    in_int = False
    marker = 0
    for j in range(problem.num_vars):
        want_int = problem.kinds[j] != CONTINUOUS
        if want_int != in_int:
            tag = "'INTORG'" if want_int else "'INTEND'"
            out.append(f"    M{marker}  'MARKER'  {tag}")
            marker += 1
            in_int = want_int
        entries = by_var[j] or [(obj_name, 0.0)]  # declare entry-less variables
        for rname, coef in entries:
            out.append(f"    {problem.var_names[j]}  {rname}  {_fmt(coef)}")
    if in_int:
        out.append(f"    M{marker}  'MARKER'  'INTEND'")

    out.append("RHS")
    for row in problem.rows:
        if row.rhs != 0.0:
            out.append(f"    RHS  {row.name}  {_fmt(row.rhs)}")

    bounds = []
    for j in range(problem.num_vars):
        lo, up, name = problem.lower[j], problem.upper[j], problem.var_names[j]
        if problem.kinds[j] == CONTINUOUS:
            if lo == 0.0 and up == INF:
                continue
            if lo == up:
                bounds.append(f" FX BND {name}  {_fmt(lo)}")
                continue
            if lo == -INF and up == INF:
                bounds.append(f" FR BND {name}")
                continue
            if lo == -INF:
                bounds.append(f" MI BND {name}")
            elif lo != 0.0:
                bounds.append(f" LO BND {name}  {_fmt(lo)}")
            if up != INF:
                bounds.append(f" UP BND {name}  {_fmt(up)}")
        else:
            if problem.kinds[j] == BINARY and lo == 0.0 and up == 1.0:
                continue  # marker default reproduces this
            if lo == up:
                bounds.append(f" FX BND {name}  {_fmt(lo)}")
                continue
            wrote = False
            if lo == -INF:
                bounds.append(f" MI BND {name}")
                wrote = True
            elif lo != 0.0:
                bounds.append(f" LO BND {name}  {_fmt(lo)}")
                wrote = True
            if up != INF:
                bounds.append(f" UP BND {name}  {_fmt(up)}")
                wrote = True
            if not wrote:  # (0, inf): PL pins the explicit-bounds semantics
                bounds.append(f" PL BND {name}")
    if bounds:
        out.append("BOUNDS")
        out.extend(bounds)
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def write_mps_file(problem: MipProblem, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_mps(problem))
