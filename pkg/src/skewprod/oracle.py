"""Brute-force enumeration of the exact factorizations X = G<c>.

Ground truth for the family constructors: for a fixed base group G
(dihedral or generalized quaternion) and complement order m, enumerate
every group structure on G x Z_m in which G embeds as given, <c> is a
complement, and multiplication extends both.  Nothing here consults the
parametric families; admission of a candidate is decided solely by the
exhaustive associativity check of its assembled table.

A candidate is a choice of the commutation data on the two generators:
c*a = phi(a)*c^pi(a) and c*b = phi(b)*c^pi(b).  The closure of that data
is computed by coset enumeration on the corresponding presentation; a
candidate that closes at full order |G|*m is then re-assembled from its
extracted commutation data and admitted only if the assembled table is a
group.  Every X = G<c> arises this way, so the census is complete.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .basegroups import DIHEDRAL, QUATERNION, BaseGroup, base_group, base_presentation
from .coset import todd_coxeter
from .errors import BoundExceeded, CapacityExceeded, NotAGroup
from .families import MarkedFactorization
from .grouptable import GroupTable, is_isomorphic
from .words import Presentation, Word, conjugation_relator

DEFAULT_ORACLE_BOUND = 96


@dataclass(frozen=True)
class CommutationData:
    """The maps (phi, pi) encoding c*g = phi(g) * c^pi(g) on a base group."""

    base: GroupTable
    m: int
    phi: tuple[int, ...]
    pi: tuple[int, ...]


def assemble_table(cd: CommutationData) -> GroupTable:
    """Build the table on pairs (g, k) -> g*m + k from commutation data.

    product((g,i), (h,j)) = (g * phi^i(h), sigma(i,h) + j mod m) with
    sigma(i,h) = sum_{l<i} pi(phi^l(h)).  Full associativity is checked
    exhaustively by the GroupTable constructor; NotAGroup on failure.
    """
    G, m = cd.base, cd.m
    ng = G.order
    phi = np.asarray(cd.phi, dtype=np.int32)
    pi = np.asarray(cd.pi, dtype=np.int32)
    if phi.shape != (ng,) or pi.shape != (ng,):
        raise NotAGroup("commutation data has the wrong size")
    if len(np.unique(phi)) != ng:
        raise NotAGroup("phi is not a permutation")
    if phi[G.identity] != G.identity:
        raise NotAGroup("phi does not fix the identity")
    # phi_pow[l] = phi^l as arrays; sigma by prefix accumulation
    phi_pow = np.empty((m, ng), dtype=np.int32)
    phi_pow[0] = np.arange(ng, dtype=np.int32)
    for l in range(1, m):
        phi_pow[l] = phi[phi_pow[l - 1]]
    sigma = np.zeros((m, ng), dtype=np.int64)
    for i in range(1, m):
        sigma[i] = sigma[i - 1] + pi[phi_pow[i - 1]]
    sigma %= m

    pairs_g = np.repeat(np.arange(ng, dtype=np.int64), m)
    pairs_k = np.tile(np.arange(m, dtype=np.int64), ng)
    n = ng * m
    product = np.empty((n, n), dtype=np.int32)
    base_prod = G.product.astype(np.int64)
    for h in range(ng):
        for j in range(m):
            col_g = base_prod[pairs_g, phi_pow[pairs_k, h]]
            col_k = (sigma[pairs_k, h] + j) % m
            product[:, h * m + j] = col_g * m + col_k
    return GroupTable(product)


def extract_commutation(
    base: BaseGroup, X: GroupTable, a: int, b: int, c: int, m: int
) -> CommutationData:
    """Read (phi, pi) off a built X = <a,b><c> in base-group coordinates."""
    g_members = X.generate([a, b])
    if len(g_members) != base.order:
        raise NotAGroup("G part has the wrong order")
    # identify base elements with X's G part via defining words
    to_x = np.full(base.order, -1, dtype=np.int32)
    to_x[base.group.identity] = X.identity
    pending = [base.group.identity]
    while pending:
        g = pending.pop()
        for bg, xg in ((base.a, a), (base.b, b)):
            ng = base.group.mul(g, bg)
            if to_x[ng] < 0:
                to_x[ng] = X.mul(int(to_x[g]), xg)
                pending.append(ng)
    g_set = {int(v): i for i, v in enumerate(to_x)}
    if len(g_set) != base.order or set(g_set) != set(g_members.members):
        raise NotAGroup("G part does not match the base group")
    c_pows = [X.identity]
    for _ in range(m - 1):
        c_pows.append(X.mul(c_pows[-1], c))
    c_inv_pows = [X.inv(x) for x in c_pows]
    phi = np.empty(base.order, dtype=np.int32)
    pi = np.empty(base.order, dtype=np.int32)
    for g in range(base.order):
        z = X.mul(c, int(to_x[g]))
        for k in range(m):
            cand = X.mul(z, c_inv_pows[k])
            if cand in g_set:
                phi[g] = g_set[cand]
                pi[g] = k
                break
        else:
            raise NotAGroup("element has no normal form g * c^k")
    return CommutationData(base.group, m, tuple(int(v) for v in phi), tuple(int(v) for v in pi))


@dataclass
class OracleClass:
    """One isomorphism class found by the oracle."""

    representative: MarkedFactorization
    class_id: str
    size: int  # number of commutation data realizing the class
    core_free: bool
    members_provenance: list[dict] = field(default_factory=list)


@dataclass
class OracleCensus:
    flavor: str
    n: int
    m: int
    classes: list[OracleClass]

    def core_free_classes(self) -> list[OracleClass]:
        return [cls for cls in self.classes if cls.core_free]


def class_id_of(mf: MarkedFactorization) -> str:
    return hashlib.sha256(mf.canonical_bytes()).hexdigest()[:12]


def enumerate_skew_products(
    flavor: str,
    n: int,
    m: int,
    oracle_bound: int = DEFAULT_ORACLE_BOUND,
    keep_non_corefree: bool = True,
) -> OracleCensus:
    """Census of all X = G<c> with the given base and complement order.

    Results are grouped into abstract isomorphism classes, deterministic
    order (by canonical table bytes of the first representative found).
    Classes with a non-core-free complement are kept but flagged.
    """
    base = base_group(flavor, n)
    N = base.order * m
    if N > oracle_bound:
        raise BoundExceeded(f"|X| = {N} exceeds the oracle bound {oracle_bound}")
    base_rels = list(base_presentation(flavor, n).relators)
    # words for each base element over (a, b), for the commutation relators
    labels = base.group.labels
    assert labels is not None

    ca, cb, cc = Word.gen(0), Word.gen(1), Word.gen(2)
    classes: list[OracleClass] = []
    by_fingerprint: dict = {}

    for alpha in range(base.order):
        if alpha == base.group.identity:
            continue
        word_alpha = _label_word(labels[alpha])
        for ia in range(1, m):
            for beta in range(base.order):
                if beta == base.group.identity:
                    continue
                word_beta = _label_word(labels[beta])
                for ib in range(1, m):
                    if alpha == beta and ia == ib:
                        continue  # phi must be injective on {a, b}
                    # c*a = w_alpha*c^ia and c*b = w_beta*c^ib as relators
                    rels = base_rels + [
                        cc ** m,
                        cc * ca * cc ** (-ia) * word_alpha.inverse(),
                        cc * cb * cc ** (-ib) * word_beta.inverse(),
                    ]
                    X = _close_candidate(rels, N)
                    if X is None:
                        continue
                    a, b, c = X.generator_images
                    cd = extract_commutation(base, X.group, a, b, c, m)
                    try:
                        table = assemble_table(cd)
                    except NotAGroup:
                        continue
                    mf = MarkedFactorization(
                        group=table,
                        a=_pair(base, m, "a"),
                        b=_pair(base, m, "b"),
                        c=base.group.identity * m + 1,
                        n=n,
                        m=m,
                        flavor=flavor,
                        provenance={
                            "kind": "oracle",
                            "flavor": flavor,
                            "n": n,
                            "m": m,
                            "phi_a": int(cd.phi[base.a]),
                            "pi_a": int(cd.pi[base.a]),
                            "phi_b": int(cd.phi[base.b]),
                            "pi_b": int(cd.pi[base.b]),
                        },
                    )
                    mf.verify()
                    _register(classes, by_fingerprint, mf)

    classes.sort(key=lambda cls: (not cls.core_free, cls.representative.group.order, cls.class_id))
    return OracleCensus(flavor, n, m, classes)


def _pair(base: BaseGroup, m: int, which: str) -> int:
    g = base.a if which == "a" else base.b
    return g * m


def _label_word(label: str) -> Word:
    """Label strings are generator names concatenated ('1' = identity)."""
    if label == "1":
        return Word()
    return Word.from_pairs((0 if ch == "a" else 1, 1) for ch in label)


def _close_candidate(rels, N: int):
    # The presented group has order <= N (the commutation relators rewrite
    # every word to g * c^k), so the enumeration always closes; HLT can
    # overallocate on badly collapsing candidates, hence the Felsch retry.
    P = Presentation(3, tuple(rels), ("a", "b", "c"))
    try:
        enum = todd_coxeter(P, max_cosets=8 * N + 64)
    except CapacityExceeded:
        try:
            enum = todd_coxeter(P, max_cosets=64 * N + 64)
        except CapacityExceeded:
            enum = todd_coxeter(P, max_cosets=100_000, strategy="felsch")
    if enum.group.order != N:
        return None
    return enum


def _register(classes: list[OracleClass], by_fp: dict, mf: MarkedFactorization):
    fp = mf.group.fingerprint()
    bucket = by_fp.setdefault(fp, [])
    for cls in bucket:
        if is_isomorphic(cls.representative.group, mf.group):
            cls.size += 1
            cls.members_provenance.append(mf.provenance)
            cid = class_id_of(mf)
            if cid < cls.class_id:
                cls.class_id = cid
            return
    core_free = mf.c_core_trivial()
    cls = OracleClass(
        representative=mf,
        class_id=class_id_of(mf),
        size=1,
        core_free=core_free,
        members_provenance=[mf.provenance],
    )
    classes.append(cls)
    bucket.append(cls)
