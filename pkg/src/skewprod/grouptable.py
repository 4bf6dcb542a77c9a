"""Finite groups as explicit multiplication tables.

Elements are dense indices 0..N-1 and the product is a row-major N x N
table, so every kernel downstream gets O(1) products.  Tables are
immutable after construction and every accepted table has been checked
for associativity (exhaustively up to ``ASSOC_EXHAUSTIVE_BOUND``, on a
deterministic stride of at least a million triples above it).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BoundExceeded, NotAGroup
from .kernels import closure as _closure

ASSOC_EXHAUSTIVE_BOUND = 512
_ASSOC_SAMPLES = 1_000_000
ISO_NODE_LIMIT = 2_000_000


class GroupTable:
    """A finite group given by its full multiplication table."""

    __slots__ = (
        "order",
        "product",
        "identity",
        "inverse",
        "labels",
        "_orders",
        "_classes",
        "_fingerprint",
    )

    def __init__(
        self,
        product: np.ndarray,
        labels: Optional[Sequence[str]] = None,
        check: bool = True,
    ):
        product = np.ascontiguousarray(np.asarray(product, dtype=np.int32))
        if product.ndim != 2 or product.shape[0] != product.shape[1]:
            raise NotAGroup("product table must be square")
        n = product.shape[0]
        if n == 0:
            raise NotAGroup("empty table")
        if product.min() < 0 or product.max() >= n:
            raise NotAGroup("table entries out of range")
        self.order = n
        self.product = product
        self.product.setflags(write=False)
        self.identity = self._find_identity()
        self.inverse = self._find_inverses()
        self.labels = tuple(labels) if labels is not None else None
        self._orders = None
        self._classes = None
        self._fingerprint = None
        if check:
            self._check_associativity()

    def _find_identity(self) -> int:
        n = self.order
        rng = np.arange(n, dtype=np.int32)
        for e in range(n):
            if np.array_equal(self.product[e], rng) and np.array_equal(
                self.product[:, e], rng
            ):
                return e
        raise NotAGroup("no identity element")

    def _find_inverses(self) -> np.ndarray:
        n = self.order
        inv = np.full(n, -1, dtype=np.int32)
        rows, cols = np.nonzero(self.product == self.identity)
        inv[rows] = cols
        if (inv < 0).any():
            raise NotAGroup("missing inverse")
        if not np.array_equal(self.product[inv, np.arange(n)], np.full(n, self.identity)):
            raise NotAGroup("left and right inverses disagree")
        return inv

    def _check_associativity(self):
        n, p = self.order, self.product
        if n <= ASSOC_EXHAUSTIVE_BOUND:
            for x in range(n):
                left = p[p[x], :]
                right = p[x][p]
                if not np.array_equal(left, right):
                    raise NotAGroup(f"associativity fails at x={x}")
        else:
            # deterministic stride over >= 1e6 triples; no RNG anywhere
            step = max(1, (n * n * n) // _ASSOC_SAMPLES)
            idx = np.arange(0, n * n * n, step, dtype=np.int64)
            x, rem = idx // (n * n), idx % (n * n)
            y, z = rem // n, rem % n
            if not np.array_equal(p[p[x, y], z], p[x, p[y, z]]):
                raise NotAGroup("associativity fails on sampled triples")

    # -- basic arithmetic -------------------------------------------------

    def mul(self, x: int, y: int) -> int:
        return int(self.product[x, y])

    def inv(self, x: int) -> int:
        return int(self.inverse[x])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        out = self.identity
        while k:
            if k & 1:
                out = int(self.product[out, x])
            x = int(self.product[x, x])
            k >>= 1
        return out

    def conjugate(self, x: int, by: int) -> int:
        """x^by = by^-1 * x * by."""
        p = self.product
        return int(p[p[self.inverse[by], x], by])

    def element_order(self, x: int) -> int:
        return int(self.element_orders()[x])

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            n, p = self.order, self.product
            orders = np.zeros(n, dtype=np.int32)
            cur = np.arange(n, dtype=np.int32)
            k = 1
            while (orders == 0).any():
                orders[(orders == 0) & (cur == self.identity)] = k
                cur = p[cur, np.arange(n)]
                k += 1
                if k > n + 1:
                    raise NotAGroup("element order exceeds group order")
            self._orders = orders
        return self._orders

    def order_multiset(self) -> tuple[tuple[int, int], ...]:
        vals, counts = np.unique(self.element_orders(), return_counts=True)
        return tuple((int(v), int(c)) for v, c in zip(vals, counts))

    # -- subgroup machinery ------------------------------------------------

    def generate(self, gens: Iterable[int]) -> "SubgroupSet":
        members = _closure(self.product, sorted(set(int(g) for g in gens)), self.identity)
        return SubgroupSet(self, tuple(members))

    def set_product(self, A, B) -> tuple[int, ...]:
        """Subset product {xy : x in A, y in B}; no closure assumed."""
        a = _member_array(A)
        b = _member_array(B)
        return tuple(int(v) for v in np.unique(self.product[np.ix_(a, b)]))

    def is_subgroup(self, S) -> bool:
        s = _member_array(S)
        if self.identity not in set(int(v) for v in s):
            return False
        mask = np.zeros(self.order, dtype=bool)
        mask[s] = True
        return bool(mask[self.product[np.ix_(s, s)]].all())

    def conjugate_set(self, S, by: int) -> np.ndarray:
        s = _member_array(S)
        p = self.product
        return np.unique(p[p[self.inverse[by], s], by])

    def is_normal(self, S) -> bool:
        s = _member_array(S)
        key = np.sort(s)
        return all(
            np.array_equal(np.sort(self.conjugate_set(s, g)), key)
            for g in range(self.order)
        )

    def core(self, H) -> "SubgroupSet":
        """Largest normal subgroup inside H: intersect conjugates to a fixpoint."""
        current = set(int(v) for v in _member_array(H))
        changed = True
        while changed:
            changed = False
            arr = np.fromiter(sorted(current), dtype=np.int32, count=len(current))
            for g in range(self.order):
                conj = self.conjugate_set(arr, g)
                new = current.intersection(int(v) for v in conj)
                if len(new) < len(current):
                    current = new
                    arr = np.fromiter(sorted(current), dtype=np.int32, count=len(current))
                    changed = True
        return SubgroupSet(self, tuple(sorted(current)))

    def centralizer(self, S) -> "SubgroupSet":
        s = _member_array(S)
        left = self.product[:, s]
        right = self.product[s, :].T
        members = np.nonzero((left == right).all(axis=1))[0]
        return SubgroupSet(self, tuple(int(v) for v in members))

    def normalizer(self, S) -> "SubgroupSet":
        s = np.sort(_member_array(S))
        members = [
            g
            for g in range(self.order)
            if np.array_equal(np.sort(self.conjugate_set(s, g)), s)
        ]
        return SubgroupSet(self, tuple(members))

    def center(self) -> "SubgroupSet":
        return self.centralizer(np.arange(self.order))

    def derived_subgroup(self) -> "SubgroupSet":
        p, inv = self.product, self.inverse
        n = self.order
        xs = np.repeat(np.arange(n), n)
        ys = np.tile(np.arange(n), n)
        comms = p[p[inv[xs], inv[ys]], p[xs, ys]]
        return self.generate(np.unique(comms))

    def derived_series(self) -> list["SubgroupSet"]:
        series = [SubgroupSet(self, tuple(range(self.order)))]
        while True:
            last = series[-1]
            if len(last) == 1:
                return series
            nxt = _derived_of_subset(self, last.members)
            if len(nxt) == len(last):
                return series
            series.append(SubgroupSet(self, nxt))

    def is_solvable(self) -> bool:
        return len(self.derived_series()[-1]) == 1

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.product, self.product.T))

    def quotient(self, N) -> tuple["GroupTable", np.ndarray]:
        """Quotient by a normal subgroup; returns (table, projection array)."""
        members = _member_array(N)
        if not self.is_subgroup(members):
            raise NotAGroup("quotient by a non-subgroup")
        if not self.is_normal(members):
            raise NotAGroup("quotient by a non-normal subgroup")
        n = self.order
        proj = np.full(n, -1, dtype=np.int32)
        reps = []
        for x in range(n):
            if proj[x] < 0:
                cid = len(reps)
                reps.append(x)
                proj[self.product[x, members]] = cid
        reps_arr = np.array(reps, dtype=np.int32)
        q = proj[self.product[np.ix_(reps_arr, reps_arr)]]
        table = GroupTable(q, check=True)
        # projection must be a homomorphism on every pair
        if not np.array_equal(proj[self.product], table.product[proj][:, proj]):
            raise NotAGroup("quotient projection is not a homomorphism")
        return table, proj

    # -- conjugacy and invariants -------------------------------------------

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        if self._classes is None:
            n, p, inv = self.order, self.product, self.inverse
            seen = np.zeros(n, dtype=bool)
            classes = []
            allg = np.arange(n)
            for x in range(n):
                if not seen[x]:
                    cls = np.unique(p[p[inv, x], allg])
                    seen[cls] = True
                    classes.append(tuple(int(v) for v in cls))
            self._classes = classes
        return self._classes

    def class_of(self) -> np.ndarray:
        """Map element -> index of its conjugacy class."""
        out = np.zeros(self.order, dtype=np.int32)
        for i, cls in enumerate(self.conjugacy_classes()):
            out[list(cls)] = i
        return out

    def fingerprint(self) -> tuple:
        """Cheap isomorphism invariants used for pruning and dedup."""
        if self._fingerprint is None:
            orders = self.element_orders()
            classes = self.conjugacy_classes()
            pair_multiset = sorted(
                (len(cls), int(orders[cls[0]])) for cls in classes
            )
            self._fingerprint = (
                self.order,
                self.order_multiset(),
                len(self.center()),
                tuple(len(s) for s in self.derived_series()),
                tuple(pair_multiset),
            )
        return self._fingerprint


@dataclass(frozen=True)
class SubgroupSet:
    """A subgroup of a parent table, stored as a sorted member tuple."""

    parent: GroupTable
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x: int) -> bool:
        return x in set(self.members)

    def as_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def same_as(self, other) -> bool:
        return self.as_set() == frozenset(int(v) for v in _member_array(other))


def _member_array(S) -> np.ndarray:
    if isinstance(S, SubgroupSet):
        return np.array(S.members, dtype=np.int32)
    if isinstance(S, np.ndarray):
        return S.astype(np.int32)
    return np.array(sorted(set(int(v) for v in S)), dtype=np.int32)


def _derived_of_subset(G: GroupTable, members: tuple[int, ...]) -> tuple[int, ...]:
    """Derived subgroup of the subgroup on `members` (inside G)."""
    arr = np.array(members, dtype=np.int32)
    p, inv = G.product, G.inverse
    xs = np.repeat(arr, len(arr))
    ys = np.tile(arr, len(arr))
    comms = np.unique(p[p[inv[xs], inv[ys]], p[xs, ys]])
    return tuple(_closure(p, [int(v) for v in comms], G.identity))


def intersect(A, B) -> tuple[int, ...]:
    a = set(int(v) for v in _member_array(A))
    b = set(int(v) for v in _member_array(B))
    return tuple(sorted(a & b))


def subgroup_index(G: GroupTable, S) -> int:
    return G.order // len(_member_array(S))


# -- small-group recognition ------------------------------------------------

_SMALL_SIGNATURES = {
    (2, ((1, 1), (2, 1))): "Z2",
    (8, ((1, 1), (2, 5), (4, 2))): "D8",
    (12, ((1, 1), (2, 3), (3, 8))): "A4",
    (24, ((1, 1), (2, 9), (3, 8), (4, 6))): "S4",
}


def identify_small(G: GroupTable) -> str:
    """Recognize Z2 / D8 / A4 / S4 by order and element-order multiset."""
    return _SMALL_SIGNATURES.get((G.order, G.order_multiset()), "other")


# -- isomorphism testing ------------------------------------------------------


def _generating_sequence(G: GroupTable) -> list[int]:
    gens: list[int] = []
    closed = {G.identity}
    for x in range(G.order):
        if x not in closed:
            gens.append(x)
            closed = set(
                _closure(G.product, gens, G.identity)
            )
            if len(closed) == G.order:
                break
    return gens


def _bfs_construction(G: GroupTable, gens: Sequence[int]) -> list[tuple[int, int, int]]:
    """BFS order of all elements as (element, parent, gen_index); identity first."""
    seen = {G.identity}
    order = [(G.identity, -1, -1)]
    frontier = [G.identity]
    while frontier:
        nxt = []
        for e in frontier:
            for gi, g in enumerate(gens):
                child = int(G.product[e, g])
                if child not in seen:
                    seen.add(child)
                    order.append((child, e, gi))
                    nxt.append(child)
        frontier = nxt
    return order


def is_isomorphic(
    G1: GroupTable,
    G2: GroupTable,
    return_witness: bool = False,
    node_limit: int = ISO_NODE_LIMIT,
):
    """Decide abstract isomorphism by backtracking over generator images.

    Candidate images are filtered by (element order, conjugacy class size)
    and tried in ascending centralizer size; the resulting search is sound
    and complete.  Raises BoundExceeded past `node_limit` nodes.
    """
    if G1.order != G2.order:
        return (False, None) if return_witness else False
    if G1.fingerprint() != G2.fingerprint():
        return (False, None) if return_witness else False

    n = G1.order
    gens = _generating_sequence(G1)
    construction = _bfs_construction(G1, gens)

    orders1, orders2 = G1.element_orders(), G2.element_orders()
    class_size1 = np.zeros(n, dtype=np.int64)
    for cls in G1.conjugacy_classes():
        class_size1[list(cls)] = len(cls)
    class_size2 = np.zeros(n, dtype=np.int64)
    for cls in G2.conjugacy_classes():
        class_size2[list(cls)] = len(cls)
    cent_size2 = np.array(
        [len(G2.centralizer([x])) for x in range(n)], dtype=np.int64
    )

    candidates: list[list[int]] = []
    for g in gens:
        pool = [
            x
            for x in range(n)
            if orders2[x] == orders1[g] and class_size2[x] == class_size1[g]
        ]
        pool.sort(key=lambda x: (int(cent_size2[x]), x))
        candidates.append(pool)

    nodes = 0

    def verify(images: list[int]):
        """Build the full map from gen images; return it iff an isomorphism."""
        fmap = np.full(n, -1, dtype=np.int32)
        fmap[G1.identity] = G2.identity
        for elem, parent, gi in construction[1:]:
            fmap[elem] = G2.product[fmap[parent], images[gi]]
        if len(np.unique(fmap)) != n:
            return None
        if not np.array_equal(fmap[G1.product], G2.product[fmap][:, fmap]):
            return None
        return fmap

    def backtrack(depth: int, images: list[int], closure1: set, fmap: dict):
        nonlocal nodes
        if depth == len(gens):
            full = verify(images)
            return full
        g = gens[depth]
        for cand in candidates[depth]:
            nodes += 1
            if nodes > node_limit:
                raise BoundExceeded(
                    f"isomorphism search exceeded {node_limit} nodes"
                )
            ok, new_fmap = _extend_partial(G1, G2, fmap, g, cand)
            if ok:
                result = backtrack(depth + 1, images + [cand], closure1, new_fmap)
                if result is not None:
                    return result
        return None

    witness = backtrack(0, [], {G1.identity}, {G1.identity: G2.identity})
    found = witness is not None
    if return_witness:
        return found, witness
    return found


def _extend_partial(G1, G2, fmap: dict, g: int, img: int):
    """Extend a partial isomorphism (dict on a subgroup) by g -> img.

    Returns (ok, new_map) where new_map covers the subgroup generated by
    the old domain and g.  Conflict -> (False, None).
    """
    new = dict(fmap)
    if g in new:
        return (new[g] == img, new if new.get(g) == img else None)
    new[g] = img
    used = set(new.values())
    if len(used) != len(new):
        return False, None
    frontier = list(new.keys())
    while frontier:
        nxt = []
        items = list(new.items())
        for x in frontier:
            for y, fy in items:
                for a, b, fa, fb in ((x, y, new[x], fy), (y, x, fy, new[x])):
                    prod = int(G1.product[a, b])
                    fprod = int(G2.product[fa, fb])
                    if prod in new:
                        if new[prod] != fprod:
                            return False, None
                    else:
                        if fprod in used:
                            return False, None
                        new[prod] = fprod
                        used.add(fprod)
                        nxt.append(prod)
        frontier = nxt
    return True, new


# -- constructions -------------------------------------------------------------


def cyclic_table(m: int) -> GroupTable:
    idx = np.arange(m, dtype=np.int32)
    return GroupTable((idx[:, None] + idx[None, :]) % m)


def direct_product(G1: GroupTable, G2: GroupTable) -> GroupTable:
    """Direct product on pairs (x, y) -> x * |G2| + y."""
    n1, n2 = G1.order, G2.order
    p1 = G1.product.astype(np.int64)
    p2 = G2.product.astype(np.int64)
    block = (
        p1[:, None, :, None] * n2 + p2[None, :, None, :]
    ).reshape(n1 * n2, n1 * n2)
    return GroupTable(block.astype(np.int32))


def canonical_marked_bytes(G: GroupTable, gens: Sequence[int]) -> bytes:
    """Canonical relabeling of the table by BFS from identity over `gens`."""
    order = [e for e, _, _ in _bfs_construction(G, list(gens))]
    if len(order) != G.order:
        raise ValueError("marking does not generate the group")
    relabel = np.zeros(G.order, dtype=np.int32)
    for new, old in enumerate(order):
        relabel[old] = new
    perm = np.array(order, dtype=np.int32)
    table = relabel[G.product[np.ix_(perm, perm)]]
    return table.astype(np.int32).tobytes()
