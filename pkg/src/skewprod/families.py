"""The ten parametric families and their congruence systems.

Each family is a manifest: structural preconditions on (n, m), a residue
box to scan, formulas for derived parameters, a list of named congruence
clauses, and a relator transcription.  Parameters are stored at the
modulus their relator needs; where the source conditions determine a
value only at a smaller modulus, the manifest records the lift rule used
(see the per-family comments).

Biconditional clauses ("holds iff the index is a multiple of k") are
checked as: the left side vanishes at k and at no smaller positive index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator, Optional

import numpy as np

from .basegroups import DIHEDRAL, QUATERNION, base_presentation
from .coset import EnumeratedGroup, todd_coxeter
from .errors import (
    BoxTooLarge,
    Collapse,
    NotAutomorphism,
    SkewprodError,
    StructuralMismatch,
)
from .grouptable import GroupTable, SubgroupSet, intersect
from .words import Presentation, Word, conjugation_relator

A, B, C = 0, 1, 2
_NAMES = ("a", "b", "c")

DEFAULT_BOX_LIMIT = 100_000_000


class SoundnessFinding(SkewprodError):
    """A built group violates an invariant the construction promises."""


# ---------------------------------------------------------------------------
# parameter tuples


@dataclass(frozen=True)
class FamilyParams:
    """One parameter tuple of a family, with all derived values filled in."""

    family: str
    n: int
    m: int
    params: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(sorted(self.params)))

    @property
    def flavor(self) -> str:
        return QUATERNION if self.family.startswith("Q") else DIHEDRAL

    def get(self, name: str) -> int:
        for key, val in self.params:
            if key == name:
                return val
        raise KeyError(name)

    def as_dict(self) -> dict:
        return dict(self.params)

    def sort_key(self):
        return (self.family, self.n, self.m, tuple(v for _, v in self.params))

    def to_json(self) -> str:
        return json.dumps(
            {"family": self.family, "n": self.n, "m": self.m, "params": self.as_dict()},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "FamilyParams":
        data = json.loads(text)
        return FamilyParams(
            data["family"],
            int(data["n"]),
            int(data["m"]),
            tuple((k, int(v)) for k, v in data["params"].items()),
        )


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[str, ...] = ()


@dataclass
class MarkedFactorization:
    """A group with distinguished a, b, c realizing X = <a,b><c>."""

    group: GroupTable
    a: int
    b: int
    c: int
    n: int
    m: int
    flavor: str
    provenance: dict

    def g_part(self) -> SubgroupSet:
        return self.group.generate([self.a, self.b])

    def c_part(self) -> SubgroupSet:
        return self.group.generate([self.c])

    def c_core(self) -> SubgroupSet:
        return self.group.core(self.c_part())

    def c_core_trivial(self) -> bool:
        return len(self.c_core()) == 1

    def expected_order(self) -> int:
        g_order = 4 * self.n if self.flavor == QUATERNION else 2 * self.n
        return g_order * self.m

    def verify(self):
        """Check every invariant of the marked factorization; raise on failure."""
        G = self.group
        e = G.identity
        if self.flavor == QUATERNION:
            if G.element_order(self.a) != 2 * self.n:
                raise SoundnessFinding(f"o(a) != 2n for {self.provenance}")
            if G.mul(self.b, self.b) != G.power(self.a, self.n):
                raise SoundnessFinding(f"b^2 != a^n for {self.provenance}")
            g_order = 4 * self.n
        else:
            if G.element_order(self.a) != self.n:
                raise SoundnessFinding(f"o(a) != n for {self.provenance}")
            if G.mul(self.b, self.b) != e:
                raise SoundnessFinding(f"b^2 != 1 for {self.provenance}")
            g_order = 2 * self.n
        if G.conjugate(self.a, self.b) != G.inv(self.a):
            raise SoundnessFinding(f"a^b != a^-1 for {self.provenance}")
        if G.element_order(self.c) != self.m:
            raise SoundnessFinding(f"o(c) != m for {self.provenance}")
        g_sub = self.g_part()
        if len(g_sub) != g_order:
            raise SoundnessFinding(f"|<a,b>| != {g_order} for {self.provenance}")
        c_sub = self.c_part()
        if intersect(g_sub, c_sub) != (e,):
            raise SoundnessFinding(f"<a,b> meets <c> for {self.provenance}")
        if g_order * self.m != G.order:
            raise SoundnessFinding(f"|X| != |G|*m for {self.provenance}")
        if len(G.generate([self.a, self.b, self.c])) != G.order:
            raise SoundnessFinding(f"<a,b,c> != X for {self.provenance}")

    def canonical_bytes(self) -> bytes:
        from .grouptable import canonical_marked_bytes

        return canonical_marked_bytes(self.group, (self.a, self.b, self.c))


# ---------------------------------------------------------------------------
# modular helpers


def gsum(r: int, k: int, M: int) -> int:
    """sum_{l=1}^{k} r^l mod M, by iterative accumulation (no division)."""
    acc, p = 0, 1
    for _ in range(k):
        p = (p * r) % M
        acc = (acc + p) % M
    return acc


def _inv(x: int, M: int) -> int:
    return pow(x, -1, M)


def _mult_order(r: int, M: int, limit: int) -> Optional[int]:
    """Order of r in Z_M^*, or None if not a unit or order exceeds limit."""
    if M == 1:
        return 1
    if gcd(r, M) != 1:
        return None
    acc = 1
    for k in range(1, limit + 1):
        acc = (acc * r) % M
        if acc == 1:
            return k
    return None


def _iff_multiples(lhs, m: int, period: int) -> bool:
    """lhs(w) == 0 exactly at multiples of `period`, probed on w = 1..m."""
    for w in range(1, m + 1):
        if (lhs(w) == 0) != (w % period == 0):
            return False
    return True


# ---------------------------------------------------------------------------
# relator helpers


def _w(g: int, e: int = 1) -> Word:
    return Word.gen(g, e)


def _base_relators(flavor: str, n: int, m: int) -> list[Word]:
    rels = list(base_presentation(flavor, n).relators)
    rels.append(_w(C, m))
    return rels


# ---------------------------------------------------------------------------
# family manifests


class Family:
    """Manifest interface; concrete families override the four hooks."""

    id: str
    flavor: str
    case: int  # table row the construction targets (empirical mapping is swept)

    def structural(self, n: int, m: int) -> list[str]:
        """Violated structural preconditions (empty list = admissible)."""
        raise NotImplementedError

    def box(self, n: int, m: int) -> Iterator[dict]:
        """Candidate parameter dicts (derived values filled), lex order."""
        raise NotImplementedError

    def box_size(self, n: int, m: int) -> int:
        raise NotImplementedError

    def clauses(self, n: int, m: int, q: dict) -> list[str]:
        """Violated congruence clause ids for the candidate."""
        raise NotImplementedError

    def relators(self, n: int, m: int, q: dict) -> list[Word]:
        raise NotImplementedError


class FamilyQ1(Family):
    id = "Q1"
    flavor = QUATERNION
    case = 1

    def structural(self, n, m):
        return []

    def box_size(self, n, m):
        return n * n * m * 2 * n * m

    def box(self, n, m):
        for r in range(n):
            for s in range(n):
                for t in range(m):
                    for u in range(2 * n):
                        for v in range(m):
                            yield {"r": r, "s": s, "t": t, "u": u, "v": v}

    def clauses(self, n, m, q):
        r, s, t, u, v = q["r"], q["s"], q["t"], q["u"], q["v"]
        bad = []
        if (t * t) % m != 1 % m:
            bad.append("q1.t_sq")
        if n % 2 == 0:
            if (v * v) % m != 1 % m:
                bad.append("q1.v_sq_even_n")
        else:
            if (v * v - t) % m != 0:
                bad.append("q1.v_sq_odd_n")
        if bad:
            return bad
        if (pow(r, t - 1, n) - 1) % n != 0:
            bad.append("q1.r_pow_t")
        if (pow(r, v - 1, n) - 1) % n != 0:
            bad.append("q1.r_pow_v")
        M = 2 * n
        if (2 * s * gsum(r, t, M) + 2 * s * r - 2 * (1 - r)) % M != 0:
            bad.append("q1.s_line")
        if (2 * s * r + 2 * s * gsum(r, v, M) - u * gsum(r, t, M) + u * r - 2 * (1 - r)) % M != 0:
            bad.append("q1.su_line")
        if n % 2 == 0:
            if (u * gsum(r, v - 1, M)) % M != 0:
                bad.append("q1.u_even_n")
        else:
            if (u * gsum(r, v, M) - u * r - 2 * s * r - (n - 1) * (1 - r)) % M != 0:
                bad.append("q1.u_odd_n")
        if t != 1 and u % 2 != 0:
            bad.append("q1.u_parity")
        if bad:
            return bad
        rho = (1 - s * (gsum(r, t, M) + r)) % M

        def lhs(w):
            return (2 * s * gsum(r, w, M)) % M == 0 and (u * gsum(rho, w, M)) % M == 0

        if not _iff_multiples(lambda w: 0 if lhs(w) else 1, m, m):
            bad.append("q1.corefree_iff")
        return bad

    def relators(self, n, m, q):
        r, s, t, u, v = q["r"], q["s"], q["t"], q["u"], q["v"]
        rels = _base_relators(QUATERNION, n, m)
        rels.append(conjugation_relator(_w(A, 2), _w(C), _w(A, 2 * r)))
        rels.append(conjugation_relator(_w(C), _w(A), _w(A, 2 * s) * _w(C, t)))
        rels.append(conjugation_relator(_w(C), _w(B), _w(A, u) * _w(C, v)))
        return rels


class FamilyD1(Family):
    id = "D1"
    flavor = DIHEDRAL
    case = 1

    def structural(self, n, m):
        return []

    def box_size(self, n, m):
        return n * n * m * n * m

    def box(self, n, m):
        for r in range(n):
            for s in range(n):
                for t in range(m):
                    for u in range(n):
                        for v in range(m):
                            yield {"r": r, "s": s, "t": t, "u": u, "v": v}

    def clauses(self, n, m, q):
        r, s, t, u, v = q["r"], q["s"], q["t"], q["u"], q["v"]
        bad = []
        if (t * t) % m != 1 % m:
            bad.append("d1.t_sq")
        if (v * v) % m != 1 % m:
            bad.append("d1.v_sq")
        if bad:
            return bad
        if (2 * (pow(r, t - 1, n) - 1)) % n != 0:
            bad.append("d1.r_pow_t")
        if (2 * (pow(r, v - 1, n) - 1)) % n != 0:
            bad.append("d1.r_pow_v")
        if (u * gsum(r, v - 1, n)) % n != 0:
            bad.append("d1.u_line")
        if (2 * s * gsum(r, t, n) + 2 * s * r - 2 * (1 - r)) % n != 0:
            bad.append("d1.s_line")
        if (2 * s * r + 2 * s * gsum(r, v, n) - u * gsum(r, t, n) + u * r - 2 * (1 - r)) % n != 0:
            bad.append("d1.su_line")
        if t != 1 and u % 2 != 0:
            bad.append("d1.u_parity")
        if bad:
            return bad
        rho = (1 - s * (gsum(r, t, n) + r)) % n

        def ok(w):
            return (2 * s * gsum(r, w, n)) % n == 0 and (u * gsum(rho, w, n)) % n == 0

        if not _iff_multiples(lambda w: 0 if ok(w) else 1, m, m):
            bad.append("d1.corefree_iff")
        return bad

    def relators(self, n, m, q):
        r, s, t, u, v = q["r"], q["s"], q["t"], q["u"], q["v"]
        rels = _base_relators(DIHEDRAL, n, m)
        rels.append(conjugation_relator(_w(A, 2), _w(C), _w(A, 2 * r)))
        rels.append(conjugation_relator(_w(C), _w(A), _w(A, 2 * s) * _w(C, t)))
        rels.append(conjugation_relator(_w(C), _w(B), _w(A, u) * _w(C, v)))
        return rels


class FamilyQ2(Family):
    id = "Q2"
    flavor = QUATERNION
    case = 2
    # trivial branch (w = 0, r = s = t = u = 1) forces G = Q_8 and a
    # core-free complement of order 4, i.e. exactly (n, m) = (2, 4).
    trivial_nm = (2, 4)
    trivial_params = {"w": 0, "r": 1, "s": 1, "t": 1, "u": 1}

    def structural(self, n, m):
        return ["q2.m_even"] if m % 2 else []

    def box_size(self, n, m):
        if n % 2:
            return 1
        return max(0, m // 2 - 1) * n * n + 1

    def box(self, n, m):
        if (n, m) == self.trivial_nm:
            yield dict(self.trivial_params)
        if n % 2 == 0:
            half_m = m // 2
            for w in range(1, half_m):
                for r in range(n):
                    for u in range(n):
                        s = (u * u * (1 + gsum(r, w - 1, n)) + u * (n // 2)) % n
                        t = (2 * w * u + 1) % half_m
                        yield {"w": w, "r": r, "s": s, "t": t, "u": u}

    def clauses(self, n, m, q):
        w, r, s, t, u = q["w"], q["r"], q["s"], q["t"], q["u"]
        if w == 0:
            if (n, m) == self.trivial_nm and q == self.trivial_params:
                return []
            return ["q2.trivial_branch"]
        bad = []
        half_m, half_n = m // 2, n // 2
        if s != (u * u * (1 + gsum(r, w - 1, n)) + u * half_n) % n:
            bad.append("q2.s_def")
        if t != (2 * w * u + 1) % half_m:
            bad.append("q2.t_def")
        if (pow(r, 2 * w, n) - 1) % n != 0:
            bad.append("q2.r_pow_2w")
        if (pow(u * gsum(r, w, n) + half_n, 2, n) - r) % n != 0:
            bad.append("q2.square")
        if (s * gsum(r, t, n) + s * r - (1 - r)) % n != 0:
            bad.append("q2.s_line")
        if (2 * s * r - u * gsum(r, t, n) + u * r - (1 - r)) % n != 0:
            bad.append("q2.su_line")
        if (2 * w * (1 + u * w)) % half_m != 0:
            bad.append("q2.w_uw")
        if (n * w) % half_m != 0:
            bad.append("q2.w_n")
        if (2 * w * (r - 1)) % half_m != 0:
            bad.append("q2.w_r")
        if bad:
            return bad
        coef = 1 if u % 2 else 2

        def ok(i):
            return (coef * gsum(r, i, n)) % n == 0

        if not _iff_multiples(lambda i: 0 if ok(i) else 1, half_m, half_m):
            bad.append("q2.corefree_iff")
        return bad

    def relators(self, n, m, q):
        w, r, s, t, u = q["w"], q["r"], q["s"], q["t"], q["u"]
        rels = _base_relators(QUATERNION, n, m)
        rels.append(conjugation_relator(_w(A, 2), _w(C, 2), _w(A, 2 * r)))
        rels.append(conjugation_relator(_w(C, 2), _w(A), _w(A, 2 * s) * _w(C, 2 * t)))
        rels.append(conjugation_relator(_w(C, 2), _w(B), _w(A, 2 * u) * _w(C, 2)))
        rels.append(conjugation_relator(_w(A), _w(C), _w(B) * _w(C, 2 * w) if w else _w(B)))
        return rels


class FamilyD2(Family):
    id = "D2"
    flavor = DIHEDRAL
    case = 2
    # w = 0 branch forces X = D_8: (n, m) = (2, 2).  The relator shape
    # follows the proved lemma (the theorem statement permutes the roles
    # of the conjugators); see the decisions ledger.
    trivial_nm = (2, 2)
    trivial_params = {"w": 0, "r": 1, "s": 0, "t": 1, "u": 0}

    def structural(self, n, m):
        bad = []
        if m % 2:
            bad.append("d2.m_even")
        return bad

    def box_size(self, n, m):
        if n % 2:
            return 1
        return max(0, m // 2 - 1) * (n // 2) * (n // 2) + 1

    def box(self, n, m):
        if (n, m) == self.trivial_nm:
            yield dict(self.trivial_params)
        if n % 2 == 0:
            half_m, half_n = m // 2, n // 2
            for w in range(1, half_m):
                for r in range(half_n):
                    for u in range(half_n):
                        s = (u * u * (1 + gsum(r, w - 1, half_n))) % half_n
                        t = (1 + 2 * w * u) % half_m
                        yield {"w": w, "r": r, "s": s, "t": t, "u": u}

    def clauses(self, n, m, q):
        w, r, s, t, u = q["w"], q["r"], q["s"], q["t"], q["u"]
        if w == 0:
            if (n, m) == self.trivial_nm and q == self.trivial_params:
                return []
            return ["d2.trivial_branch"]
        bad = []
        half_m, half_n = m // 2, n // 2
        if s != (u * u * (1 + gsum(r, w - 1, half_n))) % half_n:
            bad.append("d2.s_def")
        if t != (1 + 2 * w * u) % half_m:
            bad.append("d2.t_def")
        if (n * w) % half_m != 0:
            bad.append("d2.w_n")
        if (2 * w * (r - 1)) % half_m != 0:
            bad.append("d2.w_r")
        if (2 * w * (1 + u * w)) % half_m != 0:
            bad.append("d2.w_uw")
        if (pow(r, 2 * w, half_n) - 1) % half_n != 0:
            bad.append("d2.r_pow_2w")
        if (pow(u * gsum(r, w, half_n), 2, half_n) - r) % half_n != 0:
            bad.append("d2.square")
        if ((pow(r, w, half_n) + 1) * (1 + s * (1 + gsum(r, w - 1, half_n)))) % half_n != 0:
            bad.append("d2.rw_plus")
        if bad:
            return bad

        if not _iff_multiples(
            lambda i: gsum(r, i, half_n) % half_n, half_m, half_m
        ):
            bad.append("d2.corefree_iff")
        return bad

    def relators(self, n, m, q):
        w, r, s, t, u = q["w"], q["r"], q["s"], q["t"], q["u"]
        rels = _base_relators(DIHEDRAL, n, m)
        rels.append(conjugation_relator(_w(A, 2), _w(C, 2), _w(A, 2 * r)))
        rels.append(conjugation_relator(_w(C, 2), _w(A), _w(A, 2 * s) * _w(C, 2 * t)))
        rels.append(conjugation_relator(_w(C, 2), _w(B), _w(A, 2 * u) * _w(C, 2)))
        rels.append(conjugation_relator(_w(A), _w(C), _w(B) * _w(C, 2 * w) if w else _w(B)))
        return rels


class FamilyQ3(Family):
    id = "Q3"
    flavor = QUATERNION
    case = 3
    # trivial branch (i = 0) forces G = Q_8, m = 3: X = SL(2,3)-shaped.
    # Following the proved lemma, the branch is i = s = u = 0, r = x = 1
    # (the theorem statement's u = 1 would collapse a^2).
    trivial_nm = (2, 3)
    trivial_params = {"i": 0, "r": 1, "s": 0, "u": 0, "x": 1}

    def structural(self, n, m):
        bad = []
        if n % 4 != 2:
            bad.append("q3.n_mod4")
        if m % 3:
            bad.append("q3.m_div3")
        return bad

    def box_size(self, n, m):
        return 4 * n + 1

    def box(self, n, m):
        if (n, m) == self.trivial_nm:
            yield dict(self.trivial_params)
        if m % 6 == 0 and n % 4 == 2 and n > 2:
            half = n // 2
            for r in range(n):
                if gcd(r, n) != 1:
                    continue
                if _mult_order(r, n, m) != m:
                    continue
                if (pow(r, m // 2, n) + 1) % n != 0:
                    continue
                s0 = ((pow(_inv(r, half), 3, half) - 1) * _inv(2, half)) % half
                u0 = ((pow(r, 3, half) - 1) * _inv(2 * r * r % half, half)) % half
                # the proof pins s and u even; lift mod n accordingly
                s = s0 if s0 % 2 == 0 else s0 + half
                u = u0 if u0 % 2 == 0 else u0 + half
                x0 = (-r + r * r + half) % n
                for x in (x0, (x0 + n) % (2 * n)):
                    yield {"i": 1, "r": r, "s": s, "u": u, "x": x}

    def clauses(self, n, m, q):
        if q["i"] == 0:
            if (n, m) == self.trivial_nm and q == self.trivial_params:
                return []
            return ["q3.trivial_branch"]
        r, s, u, x = q["r"], q["s"], q["u"], q["x"]
        bad = []
        if m % 6:
            bad.append("q3.m_div6")
        if gcd(r, n) != 1 or _mult_order(r, n, m) != m:
            bad.append("q3.r_order")
        elif (pow(r, m // 2, n) + 1) % n != 0:
            bad.append("q3.r_half")
        if bad:
            return bad
        half = n // 2
        if (2 * s * pow(r, 3, n) - (1 - pow(_inv(r, n), 3, n))) % n != 0:
            bad.append("q3.s_def")
        if (2 * u * pow(r, 2, n) - (pow(r, 3, n) - 1)) % n != 0:
            bad.append("q3.u_def")
        if (x - (-r + r * r + half)) % n != 0:
            bad.append("q3.x_def")
        if s % 2 or u % 2:
            bad.append("q3.su_parity")
        return bad

    def relators(self, n, m, q):
        i, r, s, u, x = q["i"], q["r"], q["s"], q["u"], q["x"]
        rels = _base_relators(QUATERNION, n, m)
        rels.append(conjugation_relator(_w(A, 2), _w(C), _w(A, 2 * r)))
        rels.append(conjugation_relator(_w(C, 3), _w(A), _w(A, 2 * s) * _w(C, 3)))
        rels.append(conjugation_relator(_w(C, 3), _w(B), _w(A, 2 * u) * _w(C, 3)))
        target = _w(B) * _w(C, i * m // 2) if i else _w(B)
        rels.append(conjugation_relator(_w(A), _w(C), target))
        rels.append(conjugation_relator(_w(B), _w(C), _w(A, x) * _w(B)))
        return rels


class FamilyD3(Family):
    id = "D3"
    flavor = DIHEDRAL
    case = 3
    # trivial branch forces X = A_4: (n, m) = (2, 3).
    trivial_nm = (2, 3)
    trivial_params = {"i": 0, "l": 1, "r": 1, "u": 0, "x": 1}

    def structural(self, n, m):
        bad = []
        if n % 4 != 2:
            bad.append("d3.n_mod4")
        if m % 3:
            bad.append("d3.m_div3")
        return bad

    def box_size(self, n, m):
        return n + 1

    def box(self, n, m):
        if (n, m) == self.trivial_nm:
            yield dict(self.trivial_params)
        if m % 6 == 0 and n % 4 == 2 and n > 2:
            half = n // 2
            # scan odd representatives; r = l^3 mod n is then odd (a unit)
            for l in range(1, n, 2):
                if gcd(l, half) != 1:
                    continue
                if _mult_order(l, half, m) != m:
                    continue
                if (pow(l, m // 2, half) + 1) % half != 0:
                    continue
                r = pow(l, 3, n)
                u = ((pow(l, 3, half) - 1) * _inv(2 * l * l % half, half)) % half
                x = (-l + l * l + half) % n
                yield {"i": 1, "l": l, "r": r, "u": u, "x": x}

    def clauses(self, n, m, q):
        if q["i"] == 0:
            if (n, m) == self.trivial_nm and q == self.trivial_params:
                return []
            return ["d3.trivial_branch"]
        l, r, u, x = q["l"], q["r"], q["u"], q["x"]
        bad = []
        half = n // 2
        if m % 6:
            bad.append("d3.m_div6")
        if gcd(l, half) != 1 or _mult_order(l, half, m) != m:
            bad.append("d3.l_order")
        elif (pow(l, m // 2, half) + 1) % half != 0:
            bad.append("d3.l_half")
        if bad:
            return bad
        if (r - pow(l, 3, n)) % n != 0 or r % 2 == 0:
            bad.append("d3.r_def")
        if (2 * u * l * l - (pow(l, 3, half) - 1)) % half != 0:
            bad.append("d3.u_def")
        if (x - (-l + l * l + half)) % n != 0:
            bad.append("d3.x_def")
        return bad

    def relators(self, n, m, q):
        i, r, u, x = q["i"], q["r"], q["u"], q["x"]
        rels = _base_relators(DIHEDRAL, n, m)
        rels.append(conjugation_relator(_w(A), _w(C, 3), _w(A, r)))
        rels.append(conjugation_relator(_w(C, 3), _w(B), _w(A, 2 * u) * _w(C, 3)))
        target = _w(B) * _w(C, i * m // 2) if i else _w(B)
        rels.append(conjugation_relator(_w(A), _w(C), target))
        rels.append(conjugation_relator(_w(B), _w(C), _w(A, x) * _w(B)))
        return rels


class FamilyQ4(Family):
    id = "Q4"
    flavor = QUATERNION
    case = 4
    # trivial branch forces G = Q_16, m = 3 (order 48).
    trivial_nm = (4, 3)
    trivial_params = {"i": 0, "r": 1, "s": 0, "u": 0, "x": 3, "z": 0, "j": 1}

    def structural(self, n, m):
        bad = []
        if n % 4:
            bad.append("q4.n_div4")
        if m % 3:
            bad.append("q4.m_div3")
        return bad

    def box_size(self, n, m):
        return 8 * n + 1

    def box(self, n, m):
        if (n, m) == self.trivial_nm:
            yield dict(self.trivial_params)
        if m % 6 == 0 and n % 8 == 4:
            half, quarter = n // 2, n // 4
            for r in range(half):
                if gcd(r, half) != 1:
                    continue
                if _mult_order(r, half, m) != m:
                    continue
                if (pow(r, m // 2, half) + 1) % half != 0:
                    continue
                s0 = ((pow(_inv(r, quarter), 3, quarter) - 1) * _inv(2, quarter)) % quarter
                u0 = ((pow(r, 3, quarter) - 1) * _inv(2 * r * r % quarter, quarter)) % quarter
                s = s0 if s0 % 2 == 0 else s0 + quarter
                u = u0 if u0 % 2 == 0 else u0 + quarter
                x0 = (-r + r * r + quarter) % half
                v = ((1 - r) * _inv(2 * r % half, half)) % half
                if v % 2 == 0:
                    continue  # 1 + 2z must be odd; no z solves an even value
                z0 = ((v - 1) // 2) % quarter
                for j in (1, 2):
                    if (1 + j * m // 3) % 3 != 2:
                        continue
                    for x in (x0, x0 + half):
                        for z in (z0, z0 + quarter):
                            yield {
                                "i": 1, "r": r, "s": s, "u": u,
                                "x": x, "z": z, "j": j,
                            }

    def clauses(self, n, m, q):
        if q["i"] == 0:
            if (n, m) == self.trivial_nm and q == self.trivial_params:
                return []
            return ["q4.trivial_branch"]
        r, s, u, x, z, j = q["r"], q["s"], q["u"], q["x"], q["z"], q["j"]
        bad = []
        half, quarter = n // 2, n // 4
        if n % 8 != 4:
            bad.append("q4.n_mod8")
        if m % 6:
            bad.append("q4.m_div6")
        if bad:
            return bad
        if gcd(r, half) != 1 or _mult_order(r, half, m) != m:
            bad.append("q4.r_order")
        elif (pow(r, m // 2, half) + 1) % half != 0:
            bad.append("q4.r_half")
        if bad:
            return bad
        if (2 * s * pow(r, 3, half) - (1 - pow(_inv(r, half), 3, half))) % half != 0:
            bad.append("q4.s_def")
        if (2 * u * r * r - (pow(r, 3, half) - 1)) % half != 0:
            bad.append("q4.u_def")
        if (x - (-r + r * r + quarter)) % half != 0:
            bad.append("q4.x_def")
        if (2 * r * (1 + 2 * z) - (1 - r)) % half != 0:
            bad.append("q4.z_def")
        if j not in (1, 2) or (1 + j * m // 3) % 3 != 2:
            bad.append("q4.j_branch")
        return bad

    def relators(self, n, m, q):
        i, r, s, u, x, z, j = (
            q["i"], q["r"], q["s"], q["u"], q["x"], q["z"], q["j"],
        )
        rels = _base_relators(QUATERNION, n, m)
        rels.append(conjugation_relator(_w(A, 4), _w(C), _w(A, 4 * r)))
        rels.append(conjugation_relator(_w(C, 3), _w(A, 2), _w(A, 4 * s) * _w(C, 3)))
        rels.append(conjugation_relator(_w(C, 3), _w(B), _w(A, 4 * u) * _w(C, 3)))
        target = _w(B) * _w(C, i * m // 2) if i else _w(B)
        rels.append(conjugation_relator(_w(A, 2), _w(C), target))
        rels.append(conjugation_relator(_w(B), _w(C), _w(A, 2 * x) * _w(B)))
        rels.append(
            conjugation_relator(
                _w(C), _w(A), _w(A, 2 + 4 * z) * _w(C, 1 + j * m // 3)
            )
        )
        return rels


class FamilyD4(Family):
    id = "D4"
    flavor = DIHEDRAL
    case = 4
    # trivial branch forces X = S_4: (n, m) = (4, 3).
    trivial_nm = (4, 3)
    trivial_params = {"i": 0, "l": 1, "r": 1, "u": 0, "x": 1, "z": 0, "k": 1}

    def structural(self, n, m):
        bad = []
        if n % 4:
            bad.append("d4.n_div4")
        if m % 3:
            bad.append("d4.m_div3")
        return bad

    def box_size(self, n, m):
        return 2 * n + 1

    def box(self, n, m):
        if (n, m) == self.trivial_nm:
            yield dict(self.trivial_params)
        if m % 6 == 0 and n % 8 == 4:
            half, quarter = n // 2, n // 4
            # odd representatives mod half; r = l^3 mod half stays odd
            for l in range(1, half, 2):
                if gcd(l, quarter) != 1:
                    continue
                if _mult_order(l, quarter, m) != m:
                    continue
                if (pow(l, m // 2, quarter) + 1) % quarter != 0:
                    continue
                r = pow(l, 3, half)
                u = ((pow(l, 3, half) - 1) * _inv(l * l % half, half)) % half
                x = (-l + l * l + quarter) % half
                z = ((1 - 3 * l) * _inv(4 * l % quarter, quarter)) % quarter
                for k in (1, 2):
                    if (1 + k * m // 3) % 3 != 2:
                        continue
                    yield {"i": 1, "l": l, "r": r, "u": u, "x": x, "z": z, "k": k}

    def clauses(self, n, m, q):
        if q["i"] == 0:
            if (n, m) == self.trivial_nm and q == self.trivial_params:
                return []
            return ["d4.trivial_branch"]
        l, r, u, x, z, k = q["l"], q["r"], q["u"], q["x"], q["z"], q["k"]
        bad = []
        half, quarter = n // 2, n // 4
        if n % 8 != 4:
            bad.append("d4.n_mod8")
        if m % 6:
            bad.append("d4.m_div6")
        if bad:
            return bad
        if gcd(l, quarter) != 1 or _mult_order(l, quarter, m) != m:
            bad.append("d4.l_order")
        elif (pow(l, m // 2, quarter) + 1) % quarter != 0:
            bad.append("d4.l_half")
        if bad:
            return bad
        if (r - pow(l, 3, half)) % half != 0:
            bad.append("d4.r_def")
        if (u * l * l - (pow(l, 3, half) - 1)) % half != 0:
            bad.append("d4.u_def")
        if (x - (-l + l * l + quarter)) % half != 0:
            bad.append("d4.x_def")
        if (4 * l * z - (1 - 3 * l)) % quarter != 0:
            bad.append("d4.z_def")
        if k not in (1, 2) or (1 + k * m // 3) % 3 != 2:
            bad.append("d4.k_branch")

        if not _iff_multiples(
            lambda jj: gsum(r, jj, half) % half, m // 3, m // 3
        ):
            bad.append("d4.corefree_iff")
        return bad

    def relators(self, n, m, q):
        i, r, u, x, z, k = q["i"], q["r"], q["u"], q["x"], q["z"], q["k"]
        rels = _base_relators(DIHEDRAL, n, m)
        rels.append(conjugation_relator(_w(A, 2), _w(C, 3), _w(A, 2 * r)))
        rels.append(conjugation_relator(_w(C, 3), _w(B), _w(A, 2 * u) * _w(C, 3)))
        target = _w(B) * _w(C, i * m // 2) if i else _w(B)
        rels.append(conjugation_relator(_w(A, 2), _w(C), target))
        rels.append(conjugation_relator(_w(B), _w(C), _w(A, 2 * x) * _w(B)))
        rels.append(
            conjugation_relator(
                _w(C), _w(A), _w(A, 2 + 4 * z) * _w(C, 1 + k * m // 3)
            )
        )
        return rels


class FamilyQ5(Family):
    id = "Q5"
    flavor = QUATERNION
    case = 5

    def structural(self, n, m):
        bad = []
        if n % 3:
            bad.append("q5.n_div3")
        if m % 8 != 4:
            bad.append("q5.m_mod8")
        return bad

    def box_size(self, n, m):
        return 2 * n

    def box(self, n, m):
        for r in range(2 * n):
            if _mult_order(r, 2 * n, m) == m // 4:
                yield {"r": r}

    def clauses(self, n, m, q):
        r = q["r"]
        if _mult_order(r, 2 * n, m) != m // 4:
            return ["q5.r_order"]
        return []

    def relators(self, n, m, q):
        r = q["r"]
        rels = _base_relators(QUATERNION, n, m)
        rels.append(conjugation_relator(_w(A), _w(C, 4), _w(A, r)))
        rels.append(conjugation_relator(_w(B), _w(C, 4), _w(A, 1 - r) * _w(B)))
        rels.append(conjugation_relator(_w(A, 3), _w(C, m // 4), _w(A, -3)))
        rels.append(conjugation_relator(_w(A), _w(C, m // 4), _w(B) * _w(C, 3 * m // 4)))
        return rels


class FamilyD5(Family):
    id = "D5"
    flavor = DIHEDRAL
    case = 5

    def structural(self, n, m):
        bad = []
        if n % 3:
            bad.append("d5.n_div3")
        if m % 8 != 4:
            bad.append("d5.m_mod8")
        return bad

    def box_size(self, n, m):
        return n

    def box(self, n, m):
        for r in range(n):
            if _mult_order(r, n, m) == m // 4:
                yield {"r": r}

    def clauses(self, n, m, q):
        r = q["r"]
        if _mult_order(r, n, m) != m // 4:
            return ["d5.r_order"]
        return []

    def relators(self, n, m, q):
        r = q["r"]
        rels = _base_relators(DIHEDRAL, n, m)
        rels.append(conjugation_relator(_w(A), _w(C, 4), _w(A, r)))
        rels.append(conjugation_relator(_w(B), _w(C, 4), _w(A, 1 - r) * _w(B)))
        rels.append(conjugation_relator(_w(A, 3), _w(C, m // 4), _w(A, -3)))
        rels.append(conjugation_relator(_w(A), _w(C, m // 4), _w(B) * _w(C, 3 * m // 4)))
        return rels


FAMILIES: dict[str, Family] = {
    fam.id: fam
    for fam in (
        FamilyQ1(), FamilyQ2(), FamilyQ3(), FamilyQ4(), FamilyQ5(),
        FamilyD1(), FamilyD2(), FamilyD3(), FamilyD4(), FamilyD5(),
    )
}


def families_for_flavor(flavor: str) -> list[str]:
    prefix = "Q" if flavor == QUATERNION else "D"
    return [prefix + d for d in "12345"]


# ---------------------------------------------------------------------------
# the five module operations


def family_presentation(p: FamilyParams) -> Presentation:
    fam = FAMILIES[p.family]
    bad = fam.structural(p.n, p.m)
    if bad:
        raise StructuralMismatch(f"{p.family}(n={p.n}, m={p.m}): {', '.join(bad)}")
    rels = fam.relators(p.n, p.m, p.as_dict())
    return Presentation(3, tuple(rels), _NAMES)


def validate_params(p: FamilyParams) -> ValidationResult:
    fam = FAMILIES[p.family]
    bad = fam.structural(p.n, p.m)
    if bad:
        return ValidationResult(False, tuple(bad))
    bad = fam.clauses(p.n, p.m, p.as_dict())
    return ValidationResult(not bad, tuple(bad))


def enumerate_params(
    family: str, n: int, m: int, box_limit: int = DEFAULT_BOX_LIMIT
) -> list[FamilyParams]:
    """All valid tuples of a family at (n, m), in deterministic lex order."""
    fam = FAMILIES[family]
    if n < 2 or m < 2:
        raise StructuralMismatch("n and m must both be at least 2")
    if fam.structural(n, m):
        return []
    if fam.box_size(n, m) > box_limit:
        raise BoxTooLarge(
            f"{family}(n={n}, m={m}) box has {fam.box_size(n, m)} candidates"
        )
    out = []
    seen = set()
    for q in fam.box(n, m):
        if not fam.clauses(n, m, q):
            p = FamilyParams(family, n, m, tuple(q.items()))
            if p not in seen:
                seen.add(p)
                out.append(p)
    out.sort(key=FamilyParams.sort_key)
    return out


def build_group(p: FamilyParams, max_cosets: Optional[int] = None) -> MarkedFactorization:
    """Build one valid tuple into a verified marked factorization.

    Raises Collapse if enumeration closes below the expected order, and
    SoundnessFinding if the result violates a promised invariant
    (including core-freeness of the complement).
    """
    result = validate_params(p)
    if not result.ok:
        raise StructuralMismatch(
            f"invalid tuple {p.to_json()}: {', '.join(result.violations)}"
        )
    pres = family_presentation(p)
    g_order = 4 * p.n if p.flavor == QUATERNION else 2 * p.n
    expected = g_order * p.m
    if max_cosets is None:
        max_cosets = 8 * expected + 64
    enum = todd_coxeter(pres, max_cosets=max_cosets)
    got = enum.group.order
    if got < expected:
        raise Collapse(
            f"{p.family} tuple {p.to_json()} closed at {got}, expected {expected}",
            got,
            expected,
        )
    if got > expected:
        raise SoundnessFinding(
            f"{p.family} tuple {p.to_json()} closed above expected order"
        )
    a, b, c = enum.generator_images
    mf = MarkedFactorization(
        group=enum.group,
        a=a,
        b=b,
        c=c,
        n=p.n,
        m=p.m,
        flavor=p.flavor,
        provenance={"kind": "family", "family": p.family, "n": p.n, "m": p.m,
                    "params": p.as_dict()},
    )
    mf.verify()
    if not mf.c_core_trivial():
        raise SoundnessFinding(
            f"{p.family} tuple {p.to_json()} has a non-core-free complement"
        )
    return mf


def cyclic_extension_check(G: GroupTable, tau, l: int, g: int) -> bool:
    """Validity test for extending G by a cyclic group of class l with t^l = g:
    the automorphism tau must satisfy tau^l = Inn(g) and tau(g) = g."""
    tau = np.asarray(tau, dtype=np.int32)
    if tau.shape != (G.order,):
        raise NotAutomorphism("tau has the wrong size")
    if len(np.unique(tau)) != G.order:
        raise NotAutomorphism("tau is not a bijection")
    if not np.array_equal(tau[G.product], G.product[tau][:, tau]):
        raise NotAutomorphism("tau is not a homomorphism")
    if l < 0:
        raise ValueError("l must be nonnegative")
    power = np.arange(G.order, dtype=np.int32)
    for _ in range(l):
        power = tau[power]
    inn = G.product[G.product[G.inv(g)], g]
    return bool(np.array_equal(power, inn) and tau[g] == g)
