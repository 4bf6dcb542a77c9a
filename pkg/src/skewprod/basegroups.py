"""Base groups: the dihedral and generalized quaternion tables.

Shared by the family constructors and the brute-force oracle; contains no
family or classification data, so the oracle's independence is preserved
by importing only this module.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coset import todd_coxeter
from .errors import StructuralMismatch
from .grouptable import GroupTable
from .words import Presentation, Word, conjugation_relator

QUATERNION = "quaternion"
DIHEDRAL = "dihedral"


def base_presentation(flavor: str, n: int) -> Presentation:
    """Defining presentation of Q_4n (a^2n = 1, b^2 = a^n, a^b = a^-1) or
    D_2n (a^n = b^2 = 1, a^b = a^-1)."""
    if n < 2:
        raise StructuralMismatch("n must be at least 2")
    a, b = Word.gen(0), Word.gen(1)
    inv_conj = conjugation_relator(a, b, a ** -1)
    if flavor == QUATERNION:
        rels = (a ** (2 * n), (b * b) * (a ** -n), inv_conj)
    elif flavor == DIHEDRAL:
        rels = (a ** n, b * b, inv_conj)
    else:
        raise StructuralMismatch(f"unknown flavor {flavor!r}")
    return Presentation(2, rels, ("a", "b"))


@dataclass(frozen=True)
class BaseGroup:
    flavor: str
    n: int
    group: GroupTable
    a: int
    b: int

    @property
    def order(self) -> int:
        return self.group.order


def base_group(flavor: str, n: int) -> BaseGroup:
    enum = todd_coxeter(base_presentation(flavor, n), max_cosets=64 * n + 64)
    a, b = enum.generator_images
    expected = 4 * n if flavor == QUATERNION else 2 * n
    if enum.group.order != expected:
        raise AssertionError(f"base group closed at {enum.group.order}, not {expected}")
    return BaseGroup(flavor, n, enum.group, a, b)
