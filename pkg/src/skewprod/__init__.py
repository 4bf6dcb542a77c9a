"""skewprod: products of dihedral / generalized quaternion groups with a
cyclic complement, as explicit finite-group computations.

Construct the ten parametric families by coset enumeration, enumerate the
same universe independently by brute-force commutation data, classify
every instance against the five-case table, and cross-check the two
routes against each other.
"""

from .errors import (
    AmbiguousMaximum,
    BoundExceeded,
    BoxTooLarge,
    CapacityExceeded,
    Collapse,
    InvalidPresentation,
    NoTableRow,
    NotAGroup,
    NotAutomorphism,
    SkewprodError,
    StructuralMismatch,
    WordParseError,
)
from .grouptable import (
    GroupTable,
    SubgroupSet,
    cyclic_table,
    direct_product,
    identify_small,
    is_isomorphic,
)
from .words import Presentation, Word, conjugation_relator, parse_word
from .coset import EnumeratedGroup, todd_coxeter
from .kernels import BACKEND as KERNEL_BACKEND

__all__ = [
    "AmbiguousMaximum",
    "BoundExceeded",
    "BoxTooLarge",
    "CapacityExceeded",
    "Collapse",
    "EnumeratedGroup",
    "GroupTable",
    "InvalidPresentation",
    "KERNEL_BACKEND",
    "NoTableRow",
    "NotAGroup",
    "NotAutomorphism",
    "Presentation",
    "SkewprodError",
    "StructuralMismatch",
    "SubgroupSet",
    "Word",
    "WordParseError",
    "conjugation_relator",
    "cyclic_table",
    "direct_product",
    "identify_small",
    "is_isomorphic",
    "parse_word",
    "todd_coxeter",
]
