"""Pure-Python twins of the hot kernels.

The compiled extension in ``_core.pyx`` implements the same functions with
identical semantics; the package selects between them at import time (see
``kernels/__init__``).  Keep the two implementations in lockstep: the test
suite cross-checks their outputs table-for-table.
"""

from __future__ import annotations

import numpy as np

UNDEF = -1


def closure(product: np.ndarray, gens, identity: int) -> list[int]:
    """Members of the subgroup generated by `gens`, sorted ascending.

    Orbit of the identity under right multiplication by the generators;
    in a finite group the generated submonoid is the subgroup.
    """
    n = product.shape[0]
    mask = np.zeros(n, dtype=bool)
    mask[identity] = True
    gens_arr = np.array(sorted(set(int(g) for g in gens)), dtype=np.int32)
    if gens_arr.size == 0:
        return [identity]
    frontier = np.array([identity], dtype=np.int32)
    while frontier.size:
        new = np.unique(product[np.ix_(frontier, gens_arr)])
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return [int(v) for v in np.nonzero(mask)[0]]


def tc_enumerate(ngens: int, relators, max_cosets: int):
    """HLT coset enumeration over the trivial subgroup.

    `relators` are sequences of letters (2*gen for a generator, 2*gen+1
    for its inverse).  Returns the closed, live-compacted coset table as
    an int32 array of shape (order, 2*ngens), or None if more than
    `max_cosets` rows would be allocated.  Coincidences are handled by
    union-find with path compression and a pending queue.
    """
    ncols = 2 * ngens
    rels = [list(r) for r in relators]
    tab = [UNDEF] * ncols  # row-major, tab[coset*ncols + letter]
    p = [0]
    queue: list[int] = []

    def rep(k: int) -> int:
        l = k
        while p[l] != l:
            l = p[l]
        while p[k] != l:
            p[k], k = l, p[k]
        return l

    def define(alpha: int, x: int) -> int:
        beta = len(p)
        if beta >= max_cosets:
            return UNDEF
        tab.extend([UNDEF] * ncols)
        p.append(beta)
        tab[alpha * ncols + x] = beta
        tab[beta * ncols + (x ^ 1)] = alpha
        return beta

    def merge(k: int, lam: int):
        k, lam = rep(k), rep(lam)
        if k != lam:
            mu, nu = (k, lam) if k < lam else (lam, k)
            p[nu] = mu
            queue.append(nu)

    def coincidence(alpha: int, beta: int):
        merge(alpha, beta)
        head = 0
        while head < len(queue):
            gamma = queue[head]
            head += 1
            for x in range(ncols):
                delta = tab[gamma * ncols + x]
                if delta != UNDEF:
                    tab[delta * ncols + (x ^ 1)] = UNDEF
                    mu = rep(gamma)
                    nu = rep(delta)
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
        queue.clear()

    def scan_and_fill(alpha: int, w: list[int]) -> bool:
        f = b = alpha
        i, r = 0, len(w) - 1
        while True:
            while i <= r:
                nxt = tab[f * ncols + w[i]]
                if nxt == UNDEF:
                    break
                f = nxt
                i += 1
            if i > r:
                if f != b:
                    coincidence(f, b)
                return True
            while r >= i:
                nxt = tab[b * ncols + (w[r] ^ 1)]
                if nxt == UNDEF:
                    break
                b = nxt
                r -= 1
            if r < i:
                coincidence(f, b)
                return True
            if r == i:
                tab[f * ncols + w[i]] = b
                tab[b * ncols + (w[i] ^ 1)] = f
                return True
            if define(f, w[i]) == UNDEF:
                return False

    alpha = 0
    while alpha < len(p):
        if rep(alpha) == alpha:
            for w in rels:
                if not scan_and_fill(alpha, w):
                    return None
                if rep(alpha) != alpha:
                    break
            if rep(alpha) == alpha:
                for x in range(ncols):
                    if tab[alpha * ncols + x] == UNDEF:
                        if define(alpha, x) == UNDEF:
                            return None
        alpha += 1

    live = [k for k in range(len(p)) if rep(k) == k]
    remap = {old: new for new, old in enumerate(live)}
    out = np.empty((len(live), ncols), dtype=np.int32)
    for new, old in enumerate(live):
        base = old * ncols
        for x in range(ncols):
            entry = tab[base + x]
            if entry == UNDEF:
                raise AssertionError("incomplete table after closed enumeration")
            out[new, x] = remap[rep(entry)]
    return out
