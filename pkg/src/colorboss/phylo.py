"""Neighbor-Joining trees, Newick text and Robinson-Foulds distance."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import LeafSetMismatch, ParseError, ValidationError


@dataclass(eq=False)
class Node:
    label: str | None = None
    length: float = 0.0  # branch to the parent
    children: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self) -> list[str]:
        return [n.label for n in self.walk() if n.is_leaf]


@dataclass(eq=False)
class PhyloTree:
    root: Node
    clamped: int = 0  # negative NJ branch lengths set to 0

    def leaves(self) -> list[str]:
        return self.root.leaves()

    def __len__(self) -> int:
        return len(self.leaves())


# -- Neighbor-Joining ----------------------------------------------------------

def _check_matrix(d, labels) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    n = len(labels)
    if d.ndim != 2 or d.shape != (n, n):
        raise ValidationError(f"matrix shape {d.shape} does not fit {n} labels")
    if n < 2:
        raise ValidationError("need at least 2 taxa")
    if len(set(labels)) != n:
        raise ValidationError("labels must be unique")
    if not np.all(np.isfinite(d)):
        raise ValidationError("matrix has non-finite entries")
    if np.any(np.diag(d) < 0) or np.any(np.diag(d) != 0):
        raise ValidationError("diagonal must be zero")
    if not np.allclose(d, d.T, rtol=0, atol=1e-12):
        raise ValidationError("matrix is not symmetric")
    return (d + d.T) / 2


def neighbor_joining(d, labels: Sequence[str]) -> PhyloTree:
    """Saitou-Nei agglomeration down to two clusters, rooted midway between them.

    Ties in the Q matrix go to the smallest (row, column) pair. A negative
    branch length is set to 0 and the difference is added to its sibling;
    ``PhyloTree.clamped`` counts how often that happened.
    """
    labels = [str(x) for x in labels]
    dist = _check_matrix(d, labels)
    nodes = [Node(label=x) for x in labels]
    clamped = 0
    while len(nodes) > 2:
        n = len(nodes)
        r = dist.sum(axis=1)
        q = (n - 2) * dist - r[:, None] - r[None, :]
        iu = np.triu_indices(n, 1)
        # argmin returns the first minimum, which in row-major triu order is the smallest (i, j)
        best = int(np.argmin(q[iu]))
        i, j = int(iu[0][best]), int(iu[1][best])
        li = 0.5 * dist[i, j] + (r[i] - r[j]) / (2 * (n - 2))
        lj = dist[i, j] - li
        if li < 0:
            li, lj, clamped = 0.0, lj + li, clamped + 1
        elif lj < 0:
            li, lj, clamped = li + lj, 0.0, clamped + 1
        nodes[i].length, nodes[j].length = li, lj
        parent = Node(children=[nodes[i], nodes[j]])
        du = 0.5 * (dist[i] + dist[j] - dist[i, j])
        keep = [x for x in range(n) if x not in (i, j)]
        new = np.zeros((n - 1, n - 1))
        new[:-1, :-1] = dist[np.ix_(keep, keep)]
        new[-1, :-1] = new[:-1, -1] = du[keep]
        dist = new
        nodes = [nodes[x] for x in keep] + [parent]
    a, b = nodes
    half = float(dist[0, 1]) / 2
    if half < 0:
        half, clamped = 0.0, clamped + 1
    a.length = b.length = half
    return PhyloTree(Node(children=[a, b]), clamped)


# -- Newick --------------------------------------------------------------------

def _fmt(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _min_label(node: Node, cache: dict) -> str:
    key = id(node)
    if key not in cache:
        cache[key] = node.label if node.is_leaf else min(_min_label(c, cache) for c in node.children)
    return cache[key]


def _quote(label: str) -> str:
    if re.search(r"[\s(),:;'\[\]]", label):
        return "'" + label.replace("'", "''") + "'"
    return label


def to_newick(tree: PhyloTree | Node) -> str:
    """Newick with branch lengths; children ordered by their smallest leaf label."""
    root = tree.root if isinstance(tree, PhyloTree) else tree
    cache: dict = {}

    def emit(node: Node) -> str:
        if node.is_leaf:
            body = _quote(node.label or "")
        else:
            kids = sorted(node.children, key=lambda c: _min_label(c, cache))
            body = "(" + ",".join(emit(c) + ":" + _fmt(c.length) for c in kids) + ")"
        return body

    return emit(root) + ";"


_TOKEN = re.compile(r"\s*('(?:[^']|'')*'|[(),:;]|[^\s(),:;]+)")


def parse_newick(text: str) -> PhyloTree:
    """Parse one Newick tree. Internal labels are kept; lengths default to 0."""
    tokens = _TOKEN.findall(text.strip())
    if not tokens or tokens[-1] != ";":
        raise ParseError("Newick text must end with ';'", None, None)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError("unexpected end of Newick text", None, None)
        pos += 1
        return tok

    def subtree() -> Node:
        node = Node()
        if peek() == "(":
            take()
            node.children.append(subtree())
            while peek() == ",":
                take()
                node.children.append(subtree())
            if take() != ")":
                raise ParseError("expected ')' in Newick text", None, None)
        tok = peek()
        if tok is not None and tok not in "(),:;":
            lab = take()
            node.label = lab[1:-1].replace("''", "'") if lab.startswith("'") else lab
        if peek() == ":":
            take()
            try:
                node.length = float(take())
            except ValueError:
                raise ParseError("bad branch length in Newick text", None, None) from None
        return node

    root = subtree()
    if take() != ";" or pos != len(tokens):
        raise ParseError("trailing text after Newick tree", None, None)
    for n in root.walk():
        if n.is_leaf and not n.label:
            raise ParseError("unlabeled leaf in Newick text", None, None)
    labels = root.leaves()
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate leaf labels in Newick text", None, None)
    return PhyloTree(root)


def read_newick(path) -> PhyloTree:
    with open(path) as fh:
        text = fh.read()
    try:
        return parse_newick(text)
    except ParseError as exc:
        raise ParseError(str(exc.args[0]) if exc.args else "bad Newick", str(path), None) from None


# -- Robinson-Foulds -------------------------------------------------------------

def bipartitions(tree: PhyloTree) -> set[frozenset]:
    """Nontrivial splits of the unrooted tree.

    Each split is stored as the side without the smallest leaf label, so the
    two edges next to a degree-2 root collapse into one split.
    """
    leaves = tree.leaves()
    all_leaves = frozenset(leaves)
    anchor = min(leaves)
    n = len(leaves)
    out = set()

    def below(node: Node) -> frozenset:
        if node.is_leaf:
            return frozenset([node.label])
        s = frozenset().union(*(below(c) for c in node.children))
        if 2 <= len(s) <= n - 2:
            out.add(all_leaves - s if anchor in s else s)
        return s

    below(tree.root)
    return out


def robinson_foulds(t1: PhyloTree, t2: PhyloTree) -> int:
    a, b = set(t1.leaves()), set(t2.leaves())
    if a != b:
        raise LeafSetMismatch(sorted(a - b), sorted(b - a))
    return len(bipartitions(t1) ^ bipartitions(t2))


def path_length_matrix(tree: PhyloTree, labels: Sequence[str] | None = None) -> np.ndarray:
    """Leaf-to-leaf path lengths, rows in ``labels`` order (default: sorted)."""
    labels = list(labels) if labels is not None else sorted(tree.leaves())
    where = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    out = np.zeros((n, n))

    def depths(node: Node) -> list[tuple[int, float]]:
        if node.is_leaf:
            return [(where[node.label], 0.0)]
        groups = [[(i, dep + c.length) for i, dep in depths(c)] for c in node.children]
        for x in range(len(groups)):
            for y in range(x + 1, len(groups)):
                for i, di in groups[x]:
                    for j, dj in groups[y]:
                        out[i, j] = out[j, i] = di + dj
        return [p for g in groups for p in g]

    depths(tree.root)
    return out


def random_tree(labels: Sequence[str], rng: np.random.Generator,
                min_length: float = 0.05, max_length: float = 1.0) -> PhyloTree:
    """Random rooted binary tree by repeatedly joining two random clusters."""
    pool = [Node(label=str(x)) for x in labels]
    while len(pool) > 1:
        i, j = sorted(rng.choice(len(pool), size=2, replace=False).tolist())
        b, a = pool.pop(j), pool.pop(i)
        for c in (a, b):
            c.length = float(rng.uniform(min_length, max_length))
        pool.append(Node(children=[a, b]))
    return PhyloTree(pool[0])
