"""
Decoding optimal flows into satisfiability certificates.

An optimal flow of the penalty or face LP has Source(i) = Source(n+i) = 1
for some i exactly when the formula is unsatisfiable. The verdict scan only
reads two source values per variable; witness paths and assignments are
reconstructed afterwards for checking.
"""

import json
from collections import deque

from src.formula import Certificate, TwoSatLpError, Verdict, evaluate, negate
from src.implication import build_implication_graph
from src.logger import get_logger
from src.lp_model import FlowVarId, clause_of_arc, column_of, counts
from src.lp_solver import SolveStatus

__all__ = [
    "Certificate",
    "DecodeError",
    "Verdict",
    "certificate_from_json",
    "certificate_to_json",
    "decide_from_solution",
    "extract_assignment_flow",
    "extract_path",
    "verify_certificate",
]


class DecodeError(TwoSatLpError):
    pass


def flow_bit(value):
    """0 or 1 for a vertex flow value; anything in (0.1, 0.9) is a solver fault."""
    if value <= 0.1:
        return 0
    if value >= 0.9:
        return 1
    raise DecodeError(f"non-integral flow value {value}")


def _check_solution(sol, n):
    if sol.status is not SolveStatus.OPTIMAL:
        raise DecodeError(f"cannot decode a {sol.status.value} solution")
    expected = counts(n)[0]
    if len(sol.primal) != expected:
        raise DecodeError(f"solution has {len(sol.primal)} values, P_{n} has {expected} columns")


def source_bit(sol, k, n):
    return flow_bit(sol.primal[column_of(FlowVarId.source(k), n)])


def decide_from_solution(sol, f):
    n = f.n
    _check_solution(sol, n)
    for i in range(1, n + 1):
        if source_bit(sol, i, n) and source_bit(sol, n + i, n):
            forward = extract_path(sol, i, n)
            backward = extract_path(sol, n + i, n)
            return Certificate.unsat(i, forward, backward)
    return Certificate.sat(extract_assignment_flow(sol, f))


def extract_path(sol, k, n):
    """
    Simple path x_k -> x_{n+k} along arcs carrying commodity k, following the
    lowest-numbered saturated out-arc and cancelling any cycle it closes.
    """
    if source_bit(sol, k, n) != 1:
        raise DecodeError(f"commodity {k} carries no flow")
    size = 2 * n
    target = negate(k, n)
    path = [k]
    position = {k: 0}
    used = set()
    v = k
    while v != target:
        step = None
        for j in range(1, size + 1):
            if j == v or (v, j) in used:
                continue
            if flow_bit(sol.primal[column_of(FlowVarId.arc(k, v, j), n)]):
                step = j
                break
        if step is None:
            raise DecodeError(f"commodity {k}: flow enters x_{v} but never leaves")
        used.add((v, step))
        if step in position:
            for dropped in path[position[step] + 1:]:
                del position[dropped]
            del path[position[step] + 1:]
        else:
            position[step] = len(path)
            path.append(step)
        v = step
    return path


def extract_assignment_flow(sol, f):
    """
    Labels literals from the optimal flow: every literal whose commodity is
    routed is false, then truth is propagated along implications; when
    propagation stalls the lowest unlabelled literal is set true.
    """
    n = f.n
    _check_solution(sol, n)
    g = build_implication_graph(f)
    label = [None] * (2 * n + 1)
    queue = deque()

    def set_true(code):
        if label[code] is False:
            raise DecodeError(f"literal {code} forced both ways; contradicts an unsat-free optimum")
        if label[code] is None:
            label[code] = True
            label[negate(code, n)] = False
            queue.append(code)

    def propagate():
        while queue:
            u = queue.popleft()
            for v0 in g.adjacency[u - 1]:
                v = v0 + 1
                if label[v] is False:
                    raise DecodeError(f"implication {u} -> {v} breaks the labelling")
                set_true(v)

    for k in range(1, 2 * n + 1):
        if source_bit(sol, k, n):
            set_true(negate(k, n))
    propagate()

    for code in range(1, 2 * n + 1):
        if label[code] is None:
            set_true(code)
            propagate()

    return tuple(label[i] for i in range(1, n + 1))


def _valid_chain(f, path, start, end):
    n = f.n
    if len(path) < 2 or path[0] != start or path[-1] != end:
        return False
    for u, v in zip(path, path[1:]):
        if not (1 <= u <= 2 * n and 1 <= v <= 2 * n) or u == v:
            return False
        clause = clause_of_arc(u, v, n)
        if clause is None or clause not in f:
            return False
    return True


def verify_certificate(f, cert):
    n = f.n
    if cert.verdict is Verdict.SAT:
        return cert.assignment is not None and len(cert.assignment) == n and evaluate(f, cert.assignment)

    if cert.witness is None or cert.paths is None or not 1 <= cert.witness <= n:
        get_logger().error("Unsat certificate carries no witness paths")
        return False
    i = cert.witness
    forward, backward = cert.paths
    return _valid_chain(f, forward, i, n + i) and _valid_chain(f, backward, n + i, i)


def certificate_to_json(cert, n):
    record = {"verdict": cert.verdict.value, "n": n}
    if cert.verdict is Verdict.SAT:
        record["assignment"] = [int(v) for v in cert.assignment]
    else:
        record["witness"] = cert.witness
        record["paths"] = [list(p) for p in cert.paths] if cert.paths else None
    return json.dumps(record)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _int_list(value, what):
    if not isinstance(value, list) or not all(_is_int(v) for v in value):
        raise DecodeError(f"malformed certificate: {what} must be a list of integers")
    return value


def certificate_from_json(text):
    """Returns (certificate, n); every field is type-checked before use."""
    try:
        record = json.loads(text)
    except ValueError as e:
        raise DecodeError(f"malformed certificate: {e}") from None
    if not isinstance(record, dict):
        raise DecodeError("malformed certificate: top level is not an object")

    try:
        verdict = Verdict(record.get("verdict"))
    except ValueError:
        raise DecodeError(f"malformed certificate: unknown verdict {record.get('verdict')!r}") from None
    n = record.get("n")
    if not _is_int(n) or n < 1:
        raise DecodeError(f"malformed certificate: n must be a positive integer, got {n!r}")

    if verdict is Verdict.SAT:
        bits = _int_list(record.get("assignment"), "assignment")
        if any(b not in (0, 1) for b in bits):
            raise DecodeError("malformed certificate: assignment entries must be 0 or 1")
        return Certificate.sat(bits), n

    witness = record.get("witness")
    if not _is_int(witness):
        raise DecodeError(f"malformed certificate: witness must be an integer, got {witness!r}")
    paths = record.get("paths")
    if paths is None:
        return Certificate.unsat(witness), n
    if not isinstance(paths, list) or len(paths) != 2:
        raise DecodeError("malformed certificate: paths must hold exactly two paths")
    forward, backward = (_int_list(p, "each path") for p in paths)
    return Certificate.unsat(witness, forward, backward), n
