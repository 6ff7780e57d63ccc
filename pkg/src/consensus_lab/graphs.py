"""Connected simple graphs and the generator families used by the experiments.

Graphs are immutable: vertex set {0..n-1}, canonical sorted edge list,
derived adjacency. Construction validates simplicity and connectivity.
Generated families put clique vertices at the lowest indices so golden
files stay stable.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import GraphParseError, InvalidParameterError


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("graph needs at least one vertex")
        canonical = []
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidParameterError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise InvalidParameterError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidParameterError(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
            canonical.append(key)
        canonical.sort()
        object.__setattr__(self, "edges", tuple(canonical))

        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

        if not _connected(self.n, self.adjacency):
            raise InvalidParameterError("graph is not connected")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def leaves(self) -> tuple[int, ...]:
        """Vertices of degree 1."""
        return tuple(v for v in range(self.n) if self.degree(v) == 1)


def _connected(n, adjacency):
    if n == 1:
        return True
    seen = bytearray(n)
    seen[0] = 1
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if not seen[w]:
                seen[w] = 1
                count += 1
                queue.append(w)
    return count == n


def _clique_edges(vertices):
    vs = list(vertices)
    return [(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs))]


def make_complete(n: int) -> Graph:
    """Complete graph on n vertices."""
    if n < 1:
        raise InvalidParameterError("make_complete requires n >= 1")
    return Graph(n, tuple(_clique_edges(range(n))))


def make_path(n: int) -> Graph:
    """Path 0-1-...-(n-1)."""
    if n < 1:
        raise InvalidParameterError("make_path requires n >= 1")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def make_cycle(n: int) -> Graph:
    """Cycle on n >= 3 vertices."""
    if n < 3:
        raise InvalidParameterError("make_cycle requires n >= 3")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def make_star(n: int) -> Graph:
    """Star with center 0 and n-1 leaves."""
    if n < 1:
        raise InvalidParameterError("make_star requires n >= 1")
    return Graph(n, tuple((0, i) for i in range(1, n)))


def make_sundew(n: int, r: int) -> Graph:
    """Clique of size n-r with r pendant edges spread round-robin.

    Pendant vertex n-r+i hangs off clique vertex i mod (n-r), so the
    pendant edges are attached as evenly as possible in vertex order.
    """
    _check_clique_pendant(n, r, "make_sundew")
    c = n - r
    edges = _clique_edges(range(c))
    for i in range(r):
        edges.append((i % c, c + i))
    return Graph(n, tuple(edges))


def make_lollipop(n: int, r: int) -> Graph:
    """Clique of size n-r with a pendant path of r edges rooted at vertex 0."""
    _check_clique_pendant(n, r, "make_lollipop")
    c = n - r
    edges = _clique_edges(range(c))
    prev = 0
    for i in range(r):
        edges.append((prev, c + i))
        prev = c + i
    return Graph(n, tuple(edges))


def make_spider(n: int, r: int, attachment) -> Graph:
    """Clique of size n-r with r pendant edges attached per ``attachment``.

    attachment[i] names the clique vertex for pendant vertex n-r+i; even
    attachment reproduces make_sundew. r=0 gives the plain clique.
    """
    if r == 0:
        if n < 2:
            raise InvalidParameterError("make_spider requires a clique of size >= 2")
        if list(attachment):
            raise InvalidParameterError("attachment must be empty when r=0")
        return make_complete(n)
    _check_clique_pendant(n, r, "make_spider")
    c = n - r
    attachment = [int(a) for a in attachment]
    if len(attachment) != r:
        raise InvalidParameterError(f"attachment must list {r} clique vertices")
    for a in attachment:
        if not 0 <= a < c:
            raise InvalidParameterError(f"attachment vertex {a} outside clique 0..{c - 1}")
    edges = _clique_edges(range(c))
    for i, a in enumerate(attachment):
        edges.append((a, c + i))
    return Graph(n, tuple(edges))


def _check_clique_pendant(n, r, who):
    if r < 1 or r > n - 2:
        raise InvalidParameterError(f"{who} requires 1 <= r <= n-2 (got n={n}, r={r})")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def jellyfish_shape(n: int) -> tuple[int, int, int]:
    """(clique size, path count, path length) used by make_jellyfish(n).

    Path length rounds 2*log2(n) and path count rounds n/log2(n)^2; the
    count is reduced (and, if it bottoms out at one path, the path
    shortened) until the clique keeps at least 2 vertices. The clique then
    has exactly n minus the path vertices, so |V| = n.
    """
    if n < 16:
        raise InvalidParameterError("make_jellyfish requires n >= 16")
    log2n = math.log2(n)
    length = _round_half_up(2.0 * log2n)
    count = max(1, _round_half_up(n / (log2n * log2n)))
    while count > 1 and count * length > n - 2:
        count -= 1
    if count * length > n - 2:
        length = n - 2
    return (n - count * length, count, length)


def make_jellyfish(n: int) -> Graph:
    """Clique with several medium-length pendant paths, |V| = n exactly.

    Shape per jellyfish_shape(n); path j roots at clique vertex j.
    """
    c, count, length = jellyfish_shape(n)
    if count > c:
        raise InvalidParameterError(f"make_jellyfish: {count} paths need {count} distinct roots, clique has {c}")
    edges = _clique_edges(range(c))
    next_vertex = c
    for j in range(count):
        prev = j
        for _ in range(length):
            edges.append((prev, next_vertex))
            prev = next_vertex
            next_vertex += 1
    return Graph(n, tuple(edges))


FAMILIES = {
    "complete": lambda n, r=None: make_complete(n),
    "path": lambda n, r=None: make_path(n),
    "cycle": lambda n, r=None: make_cycle(n),
    "star": lambda n, r=None: make_star(n),
    "sundew": lambda n, r=None: make_sundew(n, _require_r(r, "sundew")),
    "lollipop": lambda n, r=None: make_lollipop(n, _require_r(r, "lollipop")),
    "jellyfish": lambda n, r=None: make_jellyfish(n),
}


def _require_r(r, family):
    if r is None:
        raise InvalidParameterError(f"family '{family}' needs the r parameter")
    return r


def make_family(name: str, n: int, r=None) -> Graph:
    try:
        builder = FAMILIES[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return builder(n, r)


def parse_graph(text: str) -> Graph:
    """Parse the edge-list text format: first line n, then 'u v' lines.

    Blank lines and lines starting with '#' are skipped. Raises
    GraphParseError naming the offending line.
    """
    n = None
    edges = []
    edge_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 1:
                raise GraphParseError("expected a single vertex count", line=lineno)
            try:
                n = int(tokens[0])
            except ValueError:
                raise GraphParseError(f"bad vertex count {tokens[0]!r}", line=lineno) from None
            if n < 1:
                raise GraphParseError("vertex count must be >= 1", line=lineno)
            continue
        if len(tokens) != 2:
            raise GraphParseError(f"expected 'u v', got {line!r}", line=lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(f"bad vertex token in {line!r}", line=lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"edge ({u}, {v}) out of range for n={n}", line=lineno)
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", line=lineno)
        key = (min(u, v), max(u, v))
        if key in edge_lines:
            raise GraphParseError(
                f"duplicate edge ({key[0]}, {key[1]}) first seen on line {edge_lines[key]}",
                line=lineno)
        edge_lines[key] = lineno
        edges.append(key)
    if n is None:
        raise GraphParseError("empty graph file", line=1)
    try:
        return Graph(n, tuple(edges))
    except InvalidParameterError as exc:
        raise GraphParseError(str(exc)) from exc


def write_graph(graph: Graph) -> str:
    """Canonical edge-list text; inverse of parse_graph on canonical form."""
    lines = [str(graph.n)]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())
