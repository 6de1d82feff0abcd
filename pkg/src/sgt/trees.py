"""Finite plane trees encoded as DFS outdegree sequences.

The canonical encoding of an n-vertex plane tree is the sequence
(d_0, ..., d_{n-1}) of outdegrees in depth-first order.  Such a sequence is a
valid encoding iff it sums to n - 1 and every proper prefix of (d_i - 1) has
nonnegative sum (the ladder condition).  Any nonnegative sequence summing to
n - 1 has exactly one cyclic rotation satisfying the ladder condition (cycle
lemma), which is the bridge between exchangeable outdegree draws and trees.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import ValidationError


class PlaneTree:
    """Immutable rooted plane tree, vertices indexed in DFS order.

    Derived arrays (parents, depths, subtree sizes) are computed lazily and
    cached; instances are safe to share across threads after construction.
    """

    __slots__ = ("degrees", "_parents", "_depths", "_sizes", "_hash")

    def __init__(self, degrees, _validated=False):
        arr = np.asarray(degrees, dtype=np.int64)
        if not _validated:
            _validate(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "degrees", arr)
        object.__setattr__(self, "_parents", None)
        object.__setattr__(self, "_depths", None)
        object.__setattr__(self, "_sizes", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("PlaneTree is immutable")

    @property
    def n(self) -> int:
        return len(self.degrees)

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def _ensure_arrays(self):
        if self._parents is None:
            p, d, s = _kernels.tree_arrays(self.degrees)
            object.__setattr__(self, "_parents", p)
            object.__setattr__(self, "_depths", d)
            object.__setattr__(self, "_sizes", s)

    @property
    def parents(self) -> np.ndarray:
        self._ensure_arrays()
        return self._parents

    @property
    def depths(self) -> np.ndarray:
        self._ensure_arrays()
        return self._depths

    @property
    def sizes(self) -> np.ndarray:
        self._ensure_arrays()
        return self._sizes

    def parent(self, v: int) -> int | None:
        p = int(self.parents[v])
        return None if p < 0 else p

    def height(self, v: int) -> int:
        return int(self.depths[v])

    def children(self, v: int) -> list[int]:
        out = []
        c = v + 1
        for _ in range(self.degree(v)):
            out.append(c)
            c += int(self.sizes[c])
        return out

    def max_degree(self) -> int:
        return int(self.degrees.max())

    def key(self) -> tuple:
        """Hashable canonical form."""
        return tuple(int(d) for d in self.degrees)

    def __eq__(self, other):
        return isinstance(other, PlaneTree) and np.array_equal(self.degrees, other.degrees)

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.key()))
        return self._hash

    def __repr__(self):
        if self.n <= 12:
            return f"PlaneTree({','.join(str(int(d)) for d in self.degrees)})"
        return f"PlaneTree(n={self.n})"

    def serialize(self) -> str:
        """Comma-separated outdegrees (one tree per line format)."""
        return ",".join(str(int(d)) for d in self.degrees)

    @classmethod
    def deserialize(cls, line: str) -> "PlaneTree":
        return from_degrees([int(tok) for tok in line.strip().split(",")])


def _validate(arr: np.ndarray):
    if len(arr) == 0:
        raise ValidationError("empty degree sequence")
    if (arr < 0).any():
        raise ValidationError("outdegrees must be non-negative")
    n = len(arr)
    if int(arr.sum()) != n - 1:
        raise ValidationError(f"degree sum {int(arr.sum())} != n-1 = {n - 1}")
    viol = int(_kernels.ladder_violation(arr))
    if viol >= 0:
        raise ValidationError(f"ladder condition violated at index {viol}")


def from_degrees(seq) -> PlaneTree:
    """Validated plane tree from a DFS outdegree sequence."""
    return PlaneTree(seq)


def dfs_degrees(t: PlaneTree) -> tuple:
    return t.key()


def cycle_shift(seq) -> tuple[PlaneTree, int]:
    """The unique rotation of ``seq`` that encodes a tree, plus its offset.

    ``seq`` must be nonnegative and sum to len(seq) - 1; all len(seq)
    rotations are distinct (the total walk increment is -1, which rules out
    periodicity), so the valid one is unique.
    """
    arr = np.asarray(seq, dtype=np.int64)
    n = len(arr)
    if (arr < 0).any() or int(arr.sum()) != n - 1:
        raise ValidationError("need non-negative entries summing to n-1")
    j = int(_kernels.cycle_start(arr))
    rotated = np.roll(arr, -j)
    return PlaneTree(rotated, _validated=True), j


def fringe(t: PlaneTree, v: int) -> PlaneTree:
    """Subtree rooted at v: a contiguous DFS slice."""
    if not 0 <= v < t.n:
        raise ValidationError(f"vertex {v} out of range")
    size = int(t.sizes[v])
    return PlaneTree(t.degrees[v : v + size], _validated=True)


def uniform_vertex(t: PlaneTree, rng) -> int:
    """Uniformly random vertex index."""
    return int(rng.integers(0, t.n))


def explore(t: PlaneTree, policy: str = "dfs", *, K: int = None, k1: int = None,
            d0: int = None) -> list[int]:
    """Vertex ordering produced by a queue-discipline exploration.

    The scheme: repeatedly move the front of the queue to the visited list and
    insert its children into the queue by a fixed rule.

    * ``dfs``: children go to the front in left-to-right order (preorder).
    * ``modified_dfs``: like dfs, except at vertices with outdegree exactly K
      children k1+1 .. k1+d0 (1-based) go to the front and the rest to the
      back of the queue.
    """
    from collections import deque

    if policy == "modified_dfs":
        if K is None or k1 is None or d0 is None:
            raise ValidationError("modified_dfs needs K, k1, d0")
        if k1 + d0 > K or min(K, k1, d0) < 0:
            raise ValidationError("need 0 <= k1, k1 + d0 <= K")
    elif policy != "dfs":
        raise ValidationError(f"unknown exploration policy {policy!r}")

    order = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        order.append(v)
        kids = t.children(v)
        if policy == "modified_dfs" and len(kids) == K:
            front = kids[k1 : k1 + d0]
            back = kids[:k1] + kids[k1 + d0 :]
            queue.extendleft(reversed(front))
            queue.extend(back)
        else:
            queue.extendleft(reversed(kids))
    return order


def write_trees(trees, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in trees:
            fh.write(t.serialize() + "\n")


def read_trees(path) -> list[PlaneTree]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(PlaneTree.deserialize(line))
    return out
