"""
Explicit sparse LP for the multicommodity flow polytope P_n.

Commodity k (k = 1..2n) is routed from terminal t_k through the literal
vertices to terminal t_{n+k}; vertex x_{n+k} is the literal negate(k). Each
commodity has a Source variable on (t_k, x_k), a Sink variable on
(x_{n+k}, t_{n+k}) and one Arc variable per ordered pair of distinct
literals, giving 2n * 2n(2n-1) + 4n columns. Every (commodity, literal)
pair contributes one flow conservation row with zero right-hand side.

Columns are laid out as Source(1..2n), Sink(1..2n), then Arc(k, i, j) in
lexicographic (k, i, j) order; rows are (k, i) in lexicographic order.
"""

import enum
import json
import re
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

from src.formula import Clause, TwoSatLpError, negate
from src.logger import get_logger


class LpModelError(TwoSatLpError):
    pass


class VarKind(enum.Enum):
    SOURCE = "source"
    SINK = "sink"
    ARC = "arc"


class CapacityMode(enum.Enum):
    SOURCE_CAPPED = "sources"
    UNIT_CAPPED = "unit"


@dataclass(frozen=True)
class FlowVarId:
    kind: VarKind
    commodity: int
    tail: Optional[int] = None
    head: Optional[int] = None

    @classmethod
    def source(cls, k):
        return cls(VarKind.SOURCE, k)

    @classmethod
    def sink(cls, k):
        return cls(VarKind.SINK, k)

    @classmethod
    def arc(cls, k, i, j):
        return cls(VarKind.ARC, k, i, j)


@dataclass(frozen=True)
class LpInstance:
    """
    max objective·x  s.t.  rows x = rhs,  lower <= x <= upper.

    rows hold sparse (column, coefficient) pairs sorted by column; an upper
    bound of None means unbounded above. Sub-LPs produced by decompose()
    carry their commodity and the global column of each local column.
    """

    num_vars: int
    rows: Tuple[Tuple[Tuple[int, int], ...], ...]
    rhs: Tuple[int, ...]
    lower: Tuple[int, ...]
    upper: Tuple[Optional[int], ...]
    objective: Tuple[int, ...]
    n: Optional[int] = None
    capacity: Optional[CapacityMode] = None
    commodity: Optional[int] = None
    columns: Optional[Tuple[int, ...]] = None

    @property
    def num_rows(self):
        return len(self.rows)

    def global_column(self, local):
        return self.columns[local] if self.columns is not None else local


def arcs_per_commodity(n):
    return 2 * n * (2 * n - 1)


def check_order(n):
    if not isinstance(n, int) or n < 2:
        raise LpModelError(f"P_n needs n >= 2, got {n!r}")


def counts(n):
    """(variables, equalities, inequalities) of P_n in closed form."""
    check_order(n)
    return (8 * n**3 - 4 * n**2 + 4 * n, 4 * n**2, 8 * n**3 - 4 * n**2 + 6 * n)


def sink_literal(k, n):
    return negate(k, n)


def column_of(var, n):
    size = 2 * n
    k = var.commodity
    if not 1 <= k <= size:
        raise LpModelError(f"commodity {k} outside [1, {size}]")
    if var.kind is VarKind.SOURCE:
        return k - 1
    if var.kind is VarKind.SINK:
        return size + k - 1
    i, j = var.tail, var.head
    if i == j or not (1 <= i <= size and 1 <= j <= size):
        raise LpModelError(f"invalid arc ({i}, {j}) for n={n}")
    return 2 * size + (k - 1) * arcs_per_commodity(n) + (i - 1) * (size - 1) + (j - 1 if j < i else j - 2)


def var_of_column(col, n):
    size = 2 * n
    if col < 0 or col >= counts(n)[0]:
        raise LpModelError(f"column {col} outside P_{n}")
    if col < size:
        return FlowVarId.source(col + 1)
    if col < 2 * size:
        return FlowVarId.sink(col - size + 1)
    k0, rest = divmod(col - 2 * size, arcs_per_commodity(n))
    i0, j0 = divmod(rest, size - 1)
    j = j0 + 1 if j0 < i0 else j0 + 2
    return FlowVarId.arc(k0 + 1, i0 + 1, j)


def commodity_of_column(col, n):
    return var_of_column(col, n).commodity


def row_of(k, i, n):
    return (k - 1) * 2 * n + (i - 1)


def arc_columns(k, n):
    start = 4 * n + (k - 1) * arcs_per_commodity(n)
    return range(start, start + arcs_per_commodity(n))


@lru_cache(maxsize=32)
def build_pn(n, cap=CapacityMode.UNIT_CAPPED):
    """P_n as an LpInstance with a zero objective."""
    check_order(n)
    size = 2 * n
    num_vars = counts(n)[0]

    rows = []
    for k in range(1, size + 1):
        sink_at = sink_literal(k, n)
        for i in range(1, size + 1):
            entries = []
            if i == k:
                entries.append((column_of(FlowVarId.source(k), n), 1))
            if i == sink_at:
                entries.append((column_of(FlowVarId.sink(k), n), -1))
            for j in range(1, size + 1):
                if j == i:
                    continue
                entries.append((column_of(FlowVarId.arc(k, j, i), n), 1))
                entries.append((column_of(FlowVarId.arc(k, i, j), n), -1))
            rows.append(tuple(sorted(entries)))

    if cap is CapacityMode.SOURCE_CAPPED:
        upper = tuple(1 if col < size else None for col in range(num_vars))
    else:
        upper = (1,) * num_vars

    return LpInstance(
        num_vars=num_vars,
        rows=tuple(rows),
        rhs=(0,) * len(rows),
        lower=(0,) * num_vars,
        upper=upper,
        objective=(0,) * num_vars,
        n=n,
        capacity=cap,
    )


def counted_inequalities(lp):
    """Finite lower and upper bounds, the way P_n's inequality count is stated."""
    finite_lower = sum(1 for v in lp.lower if v is not None)
    finite_upper = sum(1 for v in lp.upper if v is not None)
    return finite_lower + finite_upper


def clause_of_arc(i, j, n):
    """
    The clause whose implication is the arc x_i -> x_j, i.e. {¬x_i, x_j}.
    None for x̄_a -> x_a, which would be the unit clause {a, a}.
    """
    if i == j:
        raise LpModelError(f"arc ({i}, {i}) is a self-loop")
    a = negate(i, n)
    if a == j:
        return None
    return Clause(min(a, j), max(a, j))


@lru_cache(maxsize=64)
def _arc_clauses(n):
    size = 2 * n
    return tuple(
        (i, j, clause_of_arc(i, j, n))
        for i in range(1, size + 1)
        for j in range(1, size + 1)
        if i != j
    )


def missing_arcs(f):
    """Arcs (i, j) whose clause is absent from f; unit-clause arcs are always absent."""
    return [(i, j) for i, j, clause in _arc_clauses(f.n) if clause is None or clause not in f]


def _check_same_order(f, lp):
    if lp.n != f.n:
        raise LpModelError(f"formula has n={f.n} but the LP was built for n={lp.n}")


def build_objective(f, lp):
    _check_same_order(f, lp)
    n = f.n
    penalty = -(2 * n + 1)
    objective = [0] * lp.num_vars
    for k in range(1, 2 * n + 1):
        objective[column_of(FlowVarId.source(k), n)] = 1
    for i, j in missing_arcs(f):
        for k in range(1, 2 * n + 1):
            objective[column_of(FlowVarId.arc(k, i, j), n)] = penalty
    return tuple(objective)


def with_objective(lp, objective):
    if len(objective) != lp.num_vars:
        raise LpModelError(f"objective has {len(objective)} entries, LP has {lp.num_vars} columns")
    return replace(lp, objective=tuple(objective))


def source_objective(lp):
    objective = [0] * lp.num_vars
    for k in range(1, 2 * lp.n + 1):
        objective[column_of(FlowVarId.source(k), lp.n)] = 1
    return tuple(objective)


def apply_face_fixing(lp, f):
    """Restrict to the face P_n^φ: missing-clause arcs get upper bound 0."""
    _check_same_order(f, lp)
    n = f.n
    upper = list(lp.upper)
    for i, j in missing_arcs(f):
        for k in range(1, 2 * n + 1):
            upper[column_of(FlowVarId.arc(k, i, j), n)] = 0
    return replace(lp, upper=tuple(upper), objective=source_objective(lp))


def build_theorem_lp(f, cap=CapacityMode.UNIT_CAPPED):
    lp = build_pn(f.n, cap)
    return with_objective(lp, build_objective(f, lp))


def build_face_lp(f, cap=CapacityMode.UNIT_CAPPED):
    return apply_face_fixing(build_pn(f.n, cap), f)


def decompose(lp):
    """Split P_n into its 2n disjoint single-commodity LPs."""
    if lp.n is None or lp.commodity is not None:
        raise LpModelError("decompose() needs a full P_n instance")
    n = lp.n
    size = 2 * n
    if lp.num_rows != size * size or lp.num_vars != counts(n)[0]:
        raise LpModelError(f"LP shape does not match P_{n}")

    subs = []
    for k in range(1, size + 1):
        columns = [column_of(FlowVarId.source(k), n), column_of(FlowVarId.sink(k), n)]
        columns.extend(arc_columns(k, n))
        local = {col: pos for pos, col in enumerate(columns)}

        rows = []
        for i in range(1, size + 1):
            row = lp.rows[row_of(k, i, n)]
            try:
                rows.append(tuple(sorted((local[col], coef) for col, coef in row)))
            except KeyError as e:
                raise LpModelError(
                    f"row ({k}, {i}) references column {e.args[0]} of another commodity"
                ) from None

        subs.append(
            LpInstance(
                num_vars=len(columns),
                rows=tuple(rows),
                rhs=tuple(lp.rhs[row_of(k, i, n)] for i in range(1, size + 1)),
                lower=tuple(lp.lower[c] for c in columns),
                upper=tuple(lp.upper[c] for c in columns),
                objective=tuple(lp.objective[c] for c in columns),
                n=n,
                capacity=lp.capacity,
                commodity=k,
                columns=tuple(columns),
            )
        )
    return subs


def is_network_matrix(lp):
    """
    Every column has at most one +1 and one -1 and, on P_n, both lie in its
    own commodity's rows: the node-arc incidence structure.
    """
    seen = {}
    for r, row in enumerate(lp.rows):
        for col, coef in row:
            if coef not in (1, -1):
                return False
            plus, minus, rows = seen.get(col, (0, 0, []))
            if coef == 1:
                plus += 1
            else:
                minus += 1
            rows.append(r)
            seen[col] = (plus, minus, rows)
    size = 2 * lp.n if lp.n is not None else None
    for col, (plus, minus, rows) in seen.items():
        if plus > 1 or minus > 1:
            return False
        if size is not None and lp.commodity is None:
            k = commodity_of_column(col, lp.n)
            if any(r // size != k - 1 for r in rows):
                return False
    return True


def dn_edges(n):
    """Edges of D_n: the complete bidirected graph on x_1..x_2n plus terminal edges."""
    check_order(n)
    size = 2 * n
    edges = [(("x", i), ("x", j)) for i in range(1, size + 1) for j in range(1, size + 1) if i != j]
    for i in range(1, size + 1):
        edges.append((("t", i), ("x", i)))
        edges.append((("x", i), ("t", i)))
    return edges


# --- MPS ---------------------------------------------------------------------

NAME_RE = re.compile(r"^P(?P<n>\d+)_(?P<cap>unit|sources)(?:_K(?P<k>\d+))?$")


def _width(n):
    return len(str(2 * n))


def fixed_format_ok(n):
    """Arc names are 1 + 3 digit groups; up to n = 49 they fit the 8-character MPS name field."""
    return 1 + 3 * _width(n) <= 8


def column_name(var, n):
    w = _width(n)
    if var.kind is VarKind.SOURCE:
        return f"S{var.commodity:0{w}d}"
    if var.kind is VarKind.SINK:
        return f"T{var.commodity:0{w}d}"
    return f"A{var.commodity:0{w}d}{var.tail:0{w}d}{var.head:0{w}d}"


def _var_from_name(name, n):
    w = _width(n)
    digits = name[1:]
    if not digits.isdigit():
        raise LpModelError(f"unrecognized column name {name!r}")
    parts = [int(digits[p:p + w]) for p in range(0, len(digits), w)]
    if name[0] == "S" and len(parts) == 1:
        return FlowVarId.source(parts[0])
    if name[0] == "T" and len(parts) == 1:
        return FlowVarId.sink(parts[0])
    if name[0] == "A" and len(parts) == 3:
        return FlowVarId.arc(*parts)
    raise LpModelError(f"unrecognized column name {name!r}")


def _lp_name(lp):
    if lp.n is None:
        return "LP"
    name = f"P{lp.n}_{(lp.capacity or CapacityMode.UNIT_CAPPED).value}"
    if lp.commodity is not None:
        name += f"_K{lp.commodity}"
    return name


def _column_names(lp):
    if lp.n is None:
        return [f"C{c:07d}" for c in range(lp.num_vars)]
    return [column_name(var_of_column(lp.global_column(c), lp.n), lp.n) for c in range(lp.num_vars)]


def _row_names(lp):
    if lp.n is None:
        return [f"R{r:07d}" for r in range(lp.num_rows)]
    w = _width(lp.n)
    size = 2 * lp.n
    if lp.commodity is not None:
        return [f"R{lp.commodity:0{w}d}{i:0{w}d}" for i in range(1, size + 1)]
    return [f"R{k:0{w}d}{i:0{w}d}" for k in range(1, size + 1) for i in range(1, size + 1)]


def _fmt(value):
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer():
        return str(int(value))
    return format(float(value), ".12g")


def _card(f1, f2, f3="", f4=""):
    return f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}".rstrip()


def export_mps(lp):
    """
    Fixed-format MPS, maximization, deterministic names derived from FlowVarId.

    From n = 50 on, arc names exceed 8 characters; the cards keep their layout
    but only free-format MPS readers (and read_mps) accept the file.
    """
    if lp.n is not None and not fixed_format_ok(lp.n):
        get_logger().warning(
            f"P_{lp.n} column names exceed 8 characters; read the MPS file in free format"
        )
    col_names = _column_names(lp)
    row_names = _row_names(lp)

    by_column = [[] for _ in range(lp.num_vars)]
    for r, row in enumerate(lp.rows):
        for col, coef in row:
            by_column[col].append((r, coef))

    lines = [f"NAME          {_lp_name(lp)}", "OBJSENSE", "    MAX", "ROWS", " N  OBJ"]
    lines.extend(f" E  {name}" for name in row_names)

    lines.append("COLUMNS")
    for c, name in enumerate(col_names):
        entries = by_column[c]
        if lp.objective[c] != 0 or not entries:
            lines.append(_card("", name, "OBJ", _fmt(lp.objective[c])))
        for r, coef in entries:
            lines.append(_card("", name, row_names[r], _fmt(coef)))

    lines.append("RHS")
    for r, value in enumerate(lp.rhs):
        if value != 0:
            lines.append(_card("", "RHS", row_names[r], _fmt(value)))

    lines.append("BOUNDS")
    for c, name in enumerate(col_names):
        lo, up = lp.lower[c], lp.upper[c]
        if up is not None and lo == up:
            lines.append(_card("FX", "BND", name, _fmt(up)))
            continue
        if lo != 0:
            lines.append(_card("LO", "BND", name, _fmt(lo)))
        if up is not None:
            lines.append(_card("UP", "BND", name, _fmt(up)))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def _number(token):
    try:
        return int(token)
    except ValueError:
        value = float(token)
        return int(value) if value.is_integer() else value


def read_mps(text):
    """Reads the fixed-format MPS written by export_mps()."""
    name = None
    section = None
    row_index = {}
    col_index = {}
    col_order = []
    entries = {}
    objective = {}
    rhs = {}
    lower = {}
    upper = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            head = raw.split()
            section = head[0]
            if section == "NAME":
                name = head[1] if len(head) > 1 else ""
            elif section == "ENDATA":
                break
            continue

        fields = raw.split()
        if section == "OBJSENSE":
            if fields[0] not in ("MAX", "MAXIMIZE"):
                raise LpModelError(f"line {line_no}: only maximization is supported")
        elif section == "ROWS":
            kind, row = fields
            if kind == "E":
                row_index[row] = len(row_index)
            elif kind != "N":
                raise LpModelError(f"line {line_no}: unsupported row type {kind}")
        elif section == "COLUMNS":
            col = fields[0]
            if col not in col_index:
                col_index[col] = len(col_order)
                col_order.append(col)
            c = col_index[col]
            for row, value in zip(fields[1::2], fields[2::2]):
                if row == "OBJ":
                    objective[c] = _number(value)
                elif row in row_index:
                    entries[(row_index[row], c)] = _number(value)
                else:
                    raise LpModelError(f"line {line_no}: unknown row {row}")
        elif section == "RHS":
            for row, value in zip(fields[1::2], fields[2::2]):
                rhs[row_index[row]] = _number(value)
        elif section == "BOUNDS":
            kind, _, col, value = fields
            c = col_index[col]
            if kind == "UP":
                upper[c] = _number(value)
            elif kind == "LO":
                lower[c] = _number(value)
            elif kind == "FX":
                lower[c] = upper[c] = _number(value)
            else:
                raise LpModelError(f"line {line_no}: unsupported bound type {kind}")
        else:
            raise LpModelError(f"line {line_no}: data outside a known section")

    num_vars = len(col_order)
    rows = [[] for _ in range(len(row_index))]
    for (r, c), value in entries.items():
        rows[r].append((c, value))

    n = capacity = commodity = columns = None
    match = NAME_RE.match(name or "")
    if match:
        n = int(match.group("n"))
        capacity = CapacityMode(match.group("cap"))
        if match.group("k"):
            commodity = int(match.group("k"))
            columns = tuple(column_of(_var_from_name(c, n), n) for c in col_order)

    return LpInstance(
        num_vars=num_vars,
        rows=tuple(tuple(sorted(row)) for row in rows),
        rhs=tuple(rhs.get(r, 0) for r in range(len(rows))),
        lower=tuple(lower.get(c, 0) for c in range(num_vars)),
        upper=tuple(upper.get(c) for c in range(num_vars)),
        objective=tuple(objective.get(c, 0) for c in range(num_vars)),
        n=n,
        capacity=capacity,
        commodity=commodity,
        columns=columns,
    )


def column_map_json(n):
    """FlowVarId <-> column dump for certificate tooling."""
    records = []
    for col in range(counts(n)[0]):
        var = var_of_column(col, n)
        record = {"column": col, "name": column_name(var, n), "kind": var.kind.value, "commodity": var.commodity}
        if var.kind is VarKind.ARC:
            record["tail"] = var.tail
            record["head"] = var.head
        records.append(record)
    return json.dumps({"n": n, "columns": records}, indent=2)
