"""
Implication graph G_n of a formula and the path-finding satisfiability oracle.

Vertices are literal codes shifted to 0-based (code c is vertex c-1); a
clause {a, b} contributes the implications ¬a -> b and ¬b -> a.
"""

from collections import deque
from dataclasses import dataclass
from typing import Tuple

from src.formula import Certificate, negate


@dataclass(frozen=True)
class Digraph:
    vertex_count: int
    adjacency: Tuple[Tuple[int, ...], ...]

    @property
    def edge_count(self):
        return sum(len(out) for out in self.adjacency)

    def edges(self):
        for u, out in enumerate(self.adjacency):
            for v in out:
                yield u, v

    def has_edge(self, u, v):
        return v in self.adjacency[u]


@dataclass(frozen=True)
class SccDecomposition:
    """
    component_of[v] is the component id of vertex v. Ids follow completion
    order of the depth-first search, which is a reverse topological order of
    the condensation: an edge u -> v between components has
    component_of[u] > component_of[v].
    """

    component_of: Tuple[int, ...]
    count: int

    def same_component(self, u, v):
        return self.component_of[u] == self.component_of[v]


def implication_arcs(clause, n):
    """The two implications forced by a clause, as 1-based literal codes."""
    a, b = clause
    return ((negate(a, n), b), (negate(b, n), a))


def build_implication_graph(f):
    n = f.n
    out = [set() for _ in range(2 * n)]
    for clause in f.clauses:
        for tail, head in implication_arcs(clause, n):
            out[tail - 1].add(head - 1)
    return Digraph(2 * n, tuple(tuple(sorted(s)) for s in out))


VISIT, VISIT_EDGE, POST_VISIT = range(3)


def scc(g):
    """Iterative path-based strongly connected components."""
    index = [-1] * g.vertex_count
    component_of = [-1] * g.vertex_count
    stack = []
    boundaries = []
    count = 0

    for root in range(g.vertex_count):
        if index[root] != -1:
            continue
        todo = [(VISIT, root)]
        while todo:
            op, v = todo.pop()
            if op == VISIT:
                index[v] = len(stack)
                stack.append(v)
                boundaries.append(index[v])
                todo.append((POST_VISIT, v))
                # reversed so neighbours are explored in adjacency order
                todo.extend((VISIT_EDGE, w) for w in reversed(g.adjacency[v]))
            elif op == VISIT_EDGE:
                if index[v] == -1:
                    todo.append((VISIT, v))
                elif component_of[v] == -1:
                    while index[v] < boundaries[-1]:
                        boundaries.pop()
            else:
                if boundaries[-1] == index[v]:
                    boundaries.pop()
                    for w in stack[index[v]:]:
                        component_of[w] = count
                    del stack[index[v]:]
                    count += 1

    return SccDecomposition(tuple(component_of), count)


def reachable(g, u, v):
    if u == v:
        return True
    seen = [False] * g.vertex_count
    seen[u] = True
    queue = deque([u])
    while queue:
        w = queue.popleft()
        for x in g.adjacency[w]:
            if x == v:
                return True
            if not seen[x]:
                seen[x] = True
                queue.append(x)
    return False


def find_path(g, u, v):
    """Shortest directed path u -> v as a vertex list, or None."""
    if u == v:
        return [u]
    parent = [-1] * g.vertex_count
    parent[u] = u
    queue = deque([u])
    while queue:
        w = queue.popleft()
        for x in g.adjacency[w]:
            if parent[x] != -1:
                continue
            parent[x] = w
            if x == v:
                path = [v]
                while path[-1] != u:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(x)
    return None


def unsat_witness(f, g=None):
    """
    Lowest i with x_i and x̄_i mutually reachable, with both paths as
    1-based literal codes; None when the formula is satisfiable.
    """
    g = g if g is not None else build_implication_graph(f)
    n = f.n
    for i in range(1, n + 1):
        forward = find_path(g, i - 1, n + i - 1)
        if forward is None:
            continue
        backward = find_path(g, n + i - 1, i - 1)
        if backward is None:
            continue
        return i, [v + 1 for v in forward], [v + 1 for v in backward]
    return None


def apt_decide(f):
    g = build_implication_graph(f)
    components = scc(g)
    n = f.n
    for i in range(1, n + 1):
        if components.same_component(i - 1, n + i - 1):
            forward = find_path(g, i - 1, n + i - 1)
            backward = find_path(g, n + i - 1, i - 1)
            return Certificate.unsat(i, [v + 1 for v in forward], [v + 1 for v in backward])
    # x_i is true iff its component comes later topologically than x̄_i's
    assignment = [
        components.component_of[i - 1] < components.component_of[n + i - 1]
        for i in range(1, n + 1)
    ]
    return Certificate.sat(assignment)


def is_skew_symmetric(g, n):
    for u, v in g.edges():
        if not g.has_edge(negate(v + 1, n) - 1, negate(u + 1, n) - 1):
            return False
    return True


def edge_list_text(g, n):
    lines = [f"# implication graph: {g.vertex_count} vertices, {g.edge_count} edges"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
