"""Todd-Coxeter driver: presentation -> concrete group table.

Enumeration runs over the trivial subgroup, so the closed coset table is
the regular representation and cosets are the group elements.  After
closure the cosets are relabeled canonically by BFS from the identity
coset following the generator columns in the given order, which makes the
output independent of relator order and usable in snapshot tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityExceeded, InvalidPresentation
from .grouptable import GroupTable
from .words import Presentation, Word

DEFAULT_MAX_COSETS = 100_000


@dataclass(frozen=True)
class EnumeratedGroup:
    """Result of a completed enumeration."""

    group: GroupTable
    generator_images: tuple[int, ...]

    def image_of(self, word: Word) -> int:
        g = self.group.identity
        for letter in word.letters():
            img = self.generator_images[letter // 2]
            step = img if letter % 2 == 0 else self.group.inv(img)
            g = self.group.mul(g, step)
        return g


def todd_coxeter(
    P: Presentation,
    max_cosets: int = DEFAULT_MAX_COSETS,
    strategy: str = "hlt",
) -> EnumeratedGroup:
    """Enumerate the group presented by P; raises CapacityExceeded if the
    table would need more than `max_cosets` rows."""
    if max_cosets < 1:
        raise InvalidPresentation("max_cosets must be positive")
    relators = [w.letters() for w in P.relators]
    if strategy == "hlt":
        raw = kernels.tc_enumerate(P.ngens, relators, max_cosets)
    elif strategy == "felsch":
        raw = _felsch_enumerate(P.ngens, relators, max_cosets)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if raw is None:
        raise CapacityExceeded(
            f"enumeration did not close within {max_cosets} cosets"
        )
    table = _canonical_relabel(raw, P.ngens)
    return _group_from_coset_table(table, P)


def _canonical_relabel(table: np.ndarray, ngens: int) -> np.ndarray:
    """BFS from coset 0 over generator columns, in generator order."""
    n = table.shape[0]
    order = np.full(n, -1, dtype=np.int32)
    order[0] = 0
    bfs = [0]
    head = 0
    count = 1
    while head < len(bfs):
        cur = bfs[head]
        head += 1
        for g in range(ngens):
            nxt = int(table[cur, 2 * g])
            if order[nxt] < 0:
                order[nxt] = count
                count += 1
                bfs.append(nxt)
    if count != n:
        raise AssertionError("generator columns do not span the coset table")
    perm = np.argsort(order)
    return order[table[perm]]


def _group_from_coset_table(table: np.ndarray, P: Presentation) -> EnumeratedGroup:
    n = table.shape[0]
    # shortest defining words by BFS over generator columns
    words: list[str | None] = [None] * n
    words[0] = "1"
    bfs = [0]
    head = 0
    letters: list[list[int]] = [[] for _ in range(n)]
    while head < len(bfs):
        cur = bfs[head]
        head += 1
        for g in range(P.ngens):
            nxt = int(table[cur, 2 * g])
            if words[nxt] is None:
                words[nxt] = (words[cur] + P.names[g]) if words[cur] != "1" else P.names[g]
                letters[nxt] = letters[cur] + [2 * g]
                bfs.append(nxt)
    product = np.empty((n, n), dtype=np.int32)
    col = np.arange(n, dtype=np.int32)
    for y in range(n):
        cur = col
        for letter in letters[y]:
            cur = table[cur, letter]
        product[:, y] = cur
    group = GroupTable(product, labels=words)
    gens = tuple(int(table[0, 2 * g]) for g in range(P.ngens))
    return EnumeratedGroup(group, gens)


def _felsch_enumerate(ngens: int, relators, max_cosets: int):
    """Reference Felsch-strategy enumerator (definition by first gap,
    immediate deduction processing).  Pure Python only; used behind the
    strategy flag and in cross-checks of the HLT kernel."""
    ncols = 2 * ngens
    UNDEF = -1

    # relator cycles grouped by initial letter, including inverses
    by_letter: list[list[list[int]]] = [[] for _ in range(ncols)]
    seen_cycles = set()
    for rel in relators:
        for word in (list(rel), [x ^ 1 for x in reversed(rel)]):
            if not word:
                continue
            for shift in range(len(word)):
                cyc = word[shift:] + word[:shift]
                key = tuple(cyc)
                if key not in seen_cycles:
                    seen_cycles.add(key)
                    by_letter[cyc[0]].append(cyc)

    tab = [UNDEF] * ncols
    p = [0]
    queue: list[int] = []
    deductions: list[tuple[int, int]] = []

    def rep(k: int) -> int:
        l = k
        while p[l] != l:
            l = p[l]
        while p[k] != l:
            p[k], k = l, p[k]
        return l

    def merge(k, lam):
        k, lam = rep(k), rep(lam)
        if k != lam:
            mu, nu = (k, lam) if k < lam else (lam, k)
            p[nu] = mu
            queue.append(nu)

    def coincidence(alpha, beta):
        merge(alpha, beta)
        head = 0
        while head < len(queue):
            gamma = queue[head]
            head += 1
            for x in range(ncols):
                delta = tab[gamma * ncols + x]
                if delta != UNDEF:
                    tab[delta * ncols + (x ^ 1)] = UNDEF
                    mu, nu = rep(gamma), rep(delta)
                    mux = tab[mu * ncols + x]
                    if mux != UNDEF:
                        merge(nu, mux)
                    else:
                        nux = tab[nu * ncols + (x ^ 1)]
                        if nux != UNDEF:
                            merge(mu, nux)
                        else:
                            tab[mu * ncols + x] = nu
                            tab[nu * ncols + (x ^ 1)] = mu
                            deductions.append((mu, x))
        queue.clear()

    def scan(alpha: int, w: list[int]):
        f, b = alpha, alpha
        i, r = 0, len(w) - 1
        while i <= r:
            nxt = tab[f * ncols + w[i]]
            if nxt == UNDEF:
                break
            f = nxt
            i += 1
        if i > r:
            if f != b:
                coincidence(f, b)
            return
        while r >= i:
            nxt = tab[b * ncols + (w[r] ^ 1)]
            if nxt == UNDEF:
                break
            b = nxt
            r -= 1
        if r < i:
            coincidence(f, b)
        elif r == i:
            tab[f * ncols + w[i]] = b
            tab[b * ncols + (w[i] ^ 1)] = f
            deductions.append((f, w[i]))

    def process_deductions():
        while deductions:
            alpha, x = deductions.pop()
            if rep(alpha) == alpha:
                for cyc in by_letter[x]:
                    scan(alpha, cyc)
                    if rep(alpha) != alpha:
                        break
            beta = tab[alpha * ncols + x] if rep(alpha) == alpha else UNDEF
            if beta != UNDEF and rep(beta) == beta:
                for cyc in by_letter[x ^ 1]:
                    scan(beta, cyc)
                    if rep(beta) != beta:
                        break

    while True:
        target = None
        for alpha in range(len(p)):
            if rep(alpha) != alpha:
                continue
            for x in range(ncols):
                if tab[alpha * ncols + x] == UNDEF:
                    target = (alpha, x)
                    break
            if target:
                break
        if target is None:
            break
        alpha, x = target
        beta = len(p)
        if beta >= max_cosets:
            return None
        tab.extend([UNDEF] * ncols)
        p.append(beta)
        tab[alpha * ncols + x] = beta
        tab[beta * ncols + (x ^ 1)] = alpha
        deductions.append((alpha, x))
        process_deductions()

    live = [k for k in range(len(p)) if rep(k) == k]
    remap = {old: new for new, old in enumerate(live)}
    out = np.empty((len(live), ncols), dtype=np.int32)
    for new, old in enumerate(live):
        for x in range(ncols):
            entry = tab[old * ncols + x]
            if entry == UNDEF:
                raise AssertionError("incomplete Felsch table")
            out[new, x] = remap[rep(entry)]
    return out
