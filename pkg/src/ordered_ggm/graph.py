"""Decomposable graphs given as a perfect sequence of cliques.

Nodes are 1-based integers ``1..N``. Cliques, separators and every matrix
block derived from them use ascending node order.

For a perfect sequence ``C_1..C_K`` the derived quantities are::

    H_k = C_1 | ... | C_k                      (histories)
    S_k = H_{k-1} & C_k,          k >= 2       (separators)
    q(k) = min{j : S_k <= C_j},   k >= 2       (separator owner, q(k) < k)
    Q_j = {k : q(k) = j}
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadShape, IndexMismatch, NodeCoverage, NotDecomposable


@dataclass(frozen=True)
class DecomposableGraph:
    n_nodes: int
    cliques: tuple[tuple[int, ...], ...]
    separators: tuple[tuple[int, ...], ...] = field(repr=False)
    histories: tuple[frozenset, ...] = field(repr=False)
    q_map: dict = field(repr=False)
    q_sets: dict = field(repr=False)

    @property
    def K(self):
        return len(self.cliques)

    def clique(self, k):
        """Clique ``C_k`` (1-based ``k``)."""
        return self.cliques[k - 1]

    def separator(self, k):
        """Separator ``S_k`` for ``k >= 2``."""
        if k < 2:
            raise IndexError("separators are defined for k >= 2")
        return self.separators[k - 2]

    def clique_index(self, k):
        """0-based positions of ``C_k`` in an observation vector."""
        return np.asarray(self.cliques[k - 1], dtype=np.intp) - 1

    def separator_positions(self, k, within):
        """Positions of ``S_k`` inside the sorted clique ``C_within``."""
        pos = {v: i for i, v in enumerate(self.clique(within))}
        return np.array([pos[v] for v in self.separator(k)], dtype=np.intp)

    def to_dict(self):
        return {"n_nodes": self.n_nodes, "cliques": [list(c) for c in self.cliques]}


def validate_perfect_sequence(cliques, n_nodes, allow_empty_separators=False):
    """Check a clique ordering and derive separators, histories, q and Q.

    Raises :class:`NotDecomposable` for the first ``k`` whose separator is not
    contained in an earlier clique, and :class:`NodeCoverage` when the cliques
    do not cover exactly ``1..n_nodes``.
    """
    if n_nodes < 1:
        raise NodeCoverage("graph: n_nodes must be >= 1")
    cliques = list(cliques)
    if not cliques:
        raise BadShape("graph: at least one clique is required")
    canon = []
    for k, c in enumerate(cliques, start=1):
        members = [int(v) for v in c]
        if not members:
            raise BadShape(f"graph: clique {k} is empty")
        if len(set(members)) != len(members):
            raise BadShape(f"graph: clique {k} has duplicate members")
        bad = [v for v in members if v < 1 or v > n_nodes]
        if bad:
            raise NodeCoverage(f"graph: clique {k} references node(s) {bad} outside 1..{n_nodes}")
        canon.append(tuple(sorted(members)))

    covered = set().union(*canon)
    missing = sorted(set(range(1, n_nodes + 1)) - covered)
    if missing:
        raise NodeCoverage(f"graph: node(s) {missing} belong to no clique")

    sets = [frozenset(c) for c in canon]
    histories = []
    h = frozenset()
    for c in sets:
        h = h | c
        histories.append(h)

    separators = []
    q_map = {}
    for k in range(2, len(sets) + 1):
        s = histories[k - 2] & sets[k - 1]
        if not s and not allow_empty_separators:
            raise NotDecomposable(
                k, f"graph: separator S_{k} is empty (disconnected clique {k}); "
                "empty separators are disabled"
            )
        owner = next(j for j in range(1, k + 1) if s <= sets[j - 1])
        if owner >= k:
            raise NotDecomposable(k)
        separators.append(tuple(sorted(s)))
        q_map[k] = owner

    q_sets = {j: tuple(k for k in range(2, len(sets) + 1) if q_map[k] == j)
              for j in range(1, len(sets) + 1)}

    return DecomposableGraph(
        n_nodes=int(n_nodes),
        cliques=tuple(canon),
        separators=tuple(separators),
        histories=tuple(histories),
        q_map=q_map,
        q_sets=q_sets,
    )


def zero_fill(matrix, inner, outer):
    """Embed a matrix indexed by node set ``inner`` into one indexed by ``outer``.

    Entries land at the positions of each node in sorted ``outer``; all other
    entries are zero.

    >>> zero_fill(np.ones((2, 2)), [2, 3], [1, 2, 3])
    array([[0., 0., 0.],
           [0., 1., 1.],
           [0., 1., 1.]])
    """
    a = np.asarray(matrix, dtype=float)
    inner = sorted(int(v) for v in inner)
    outer = sorted(int(v) for v in outer)
    if a.ndim != 2 or a.shape != (len(inner), len(inner)):
        raise IndexMismatch(f"zero_fill: matrix shape {a.shape} does not match |U|={len(inner)}")
    pos = {v: i for i, v in enumerate(outer)}
    try:
        idx = np.array([pos[v] for v in inner], dtype=np.intp)
    except KeyError as exc:
        raise IndexMismatch(f"zero_fill: node {exc.args[0]} of U is not in V") from None
    out = np.zeros((len(outer), len(outer)))
    out[np.ix_(idx, idx)] = a
    return out


def chain_graph(n_cliques, clique_size, separator_size=1):
    """Cliques of ``clique_size`` consecutive nodes, each overlapping the next in
    ``separator_size`` nodes."""
    K, M, s = int(n_cliques), int(clique_size), int(separator_size)
    if K < 1 or M < 1:
        raise BadShape("chain_graph: need n_cliques >= 1 and clique_size >= 1")
    if K > 1 and not 0 < s < M:
        raise BadShape(f"chain_graph: separator_size must satisfy 0 < s < M (got s={s}, M={M})")
    step = M - s
    cliques = [list(range(k * step + 1, k * step + M + 1)) for k in range(K)]
    n = K * M - (K - 1) * s if K > 1 else M
    return validate_perfect_sequence(cliques, n)


def binary_tree_graph(n_cliques, clique_size=4, separator_size=1):
    """Cliques arranged as a complete binary tree filled level by level.

    Clique ``k`` has parent ``k // 2``. A clique's own (non-separator) nodes
    are numbered consecutively; its children attach to the last ``2*s`` of
    them, ``s`` distinct nodes per child, so each child's separator is owned
    by its parent.
    """
    K, M, s = int(n_cliques), int(clique_size), int(separator_size)
    if K < 1 or M < 1:
        raise BadShape("binary_tree_graph: need n_cliques >= 1 and clique_size >= 1")
    if K > 1 and not 0 < s < M:
        raise BadShape(f"binary_tree_graph: separator_size must satisfy 0 < s < M (got s={s}, M={M})")

    cliques = [list(range(1, M + 1))]
    own = [list(range(1, M + 1))]
    next_node = M + 1
    for k in range(2, K + 1):
        parent = k // 2
        n_children = sum(1 for c in (2 * parent, 2 * parent + 1) if c <= K)
        fresh = own[parent - 1]
        if n_children * s > len(fresh):
            raise BadShape(
                f"binary_tree_graph: clique {parent} has {len(fresh)} attachable nodes, "
                f"needs {n_children * s} for {n_children} children"
            )
        slots = fresh[len(fresh) - n_children * s:]
        which = k - 2 * parent
        sep = slots[which * s:(which + 1) * s]
        new = list(range(next_node, next_node + M - s))
        next_node += M - s
        cliques.append(sep + new)
        own.append(new)
    return validate_perfect_sequence(cliques, next_node - 1)


def graph_from_config(spec):
    """Build a graph from ``{"n_nodes", "cliques"}`` or ``{"chain": {...}}`` /
    ``{"tree": {...}}`` generator shorthand (keys ``k``, ``m``, ``s``)."""
    if "chain" in spec:
        p = spec["chain"]
        return chain_graph(p["k"], p["m"], p.get("s", 1))
    if "tree" in spec:
        p = spec["tree"]
        return binary_tree_graph(p["k"], p.get("m", 4), p.get("s", 1))
    return validate_perfect_sequence(
        spec["cliques"], spec["n_nodes"], allow_empty_separators=spec.get("allow_empty_separators", False)
    )
