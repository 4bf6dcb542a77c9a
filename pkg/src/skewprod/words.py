"""Words in a free group and finite presentations.

A word is a freely reduced sequence of (generator, exponent) pairs.  A
presentation is a generator count plus a list of relator words, each read
as "word = identity".  Presentations serialize to a small JSON form whose
word grammar supports juxtaposition, ``*``, integer powers, conjugation
``x^y`` and parentheses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidPresentation, WordParseError


@dataclass(frozen=True)
class Word:
    """Freely reduced word: tuple of (generator index, nonzero exponent)."""

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for gen, exp in self.syllables:
            if exp == 0:
                raise ValueError("zero exponent in word")
            if gen < 0:
                raise ValueError("negative generator index")
        for (g1, _), (g2, _) in zip(self.syllables, self.syllables[1:]):
            if g1 == g2:
                raise ValueError("word not freely reduced")

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[int, int]]) -> "Word":
        """Build a word from arbitrary pairs, freely reducing."""
        out: list[list[int]] = []
        for gen, exp in pairs:
            if exp == 0:
                continue
            if out and out[-1][0] == gen:
                out[-1][1] += exp
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([gen, exp])
        return Word(tuple((g, e) for g, e in out))

    @staticmethod
    def gen(g: int, exp: int = 1) -> "Word":
        return Word.from_pairs([(g, exp)])

    def __mul__(self, other: "Word") -> "Word":
        return Word.from_pairs(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word.from_pairs((g, -e) for g, e in reversed(self.syllables))

    def __pow__(self, k: int) -> "Word":
        if k == 0:
            return Word()
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def conjugate(self, by: "Word") -> "Word":
        """x^y = y^-1 x y."""
        return by.inverse() * self * by

    def length(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def letters(self) -> list[int]:
        """Flatten to letters: 2*gen for the generator, 2*gen+1 for its inverse."""
        out = []
        for gen, exp in self.syllables:
            letter = 2 * gen if exp > 0 else 2 * gen + 1
            out.extend([letter] * abs(exp))
        return out

    def max_generator(self) -> int:
        return max((g for g, _ in self.syllables), default=-1)

    def format(self, names: Sequence[str]) -> str:
        if not self.syllables:
            return "1"
        parts = []
        for gen, exp in self.syllables:
            parts.append(names[gen] if exp == 1 else f"{names[gen]}^{exp}")
        return "*".join(parts)


def conjugation_relator(x: Word, y: Word, rhs: Word) -> Word:
    """Relator form of the conjugation equation x^y = rhs: y^-1 x y rhs^-1."""
    return x.conjugate(y) * rhs.inverse()


def commutator(x: Word, y: Word) -> Word:
    return x.inverse() * y.inverse() * x * y


@dataclass(frozen=True)
class Presentation:
    """Finitely presented group: ngens generators, relators = identity."""

    ngens: int
    relators: tuple[Word, ...]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.ngens < 1:
            raise InvalidPresentation("need at least one generator")
        names = self.names or tuple(_default_names(self.ngens))
        if len(names) != self.ngens:
            raise InvalidPresentation("generator name count mismatch")
        object.__setattr__(self, "names", names)
        for rel in self.relators:
            if rel.max_generator() >= self.ngens:
                raise InvalidPresentation(
                    f"relator {rel.format(names)} uses an undeclared generator"
                )

    def to_json(self) -> str:
        return json.dumps(
            {
                "generators": list(self.names),
                "relators": [w.format(self.names) for w in self.relators],
            }
        )

    @staticmethod
    def from_json(text: str) -> "Presentation":
        data = json.loads(text)
        names = list(data["generators"])
        if len(set(names)) != len(names):
            raise InvalidPresentation("duplicate generator names")
        relators = tuple(parse_word(s, names) for s in data["relators"])
        return Presentation(len(names), relators, tuple(names))


def _default_names(n: int) -> list[str]:
    base = "abcdefghijklmnopqrstuvwxyz"
    if n <= len(base):
        return list(base[:n])
    return [f"g{i}" for i in range(n)]


class _WordParser:
    """Recursive-descent parser for the word grammar.

    word   := factor { ["*"] factor }
    factor := atom [ "^" (integer | atom) ]      x^y with word y = conjugation
    atom   := name | "(" word ")"

    Generator names are matched longest-first.  Errors cite byte offsets.
    """

    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.pos = 0
        self.names = sorted(range(len(names)), key=lambda i: -len(names[i]))
        self.name_strs = list(names)

    def parse(self) -> Word:
        word = self._word()
        self._skip_ws()
        if self.pos != len(self.text):
            raise WordParseError("trailing input", self.pos)
        return word

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _word(self) -> Word:
        out = self._factor()
        while True:
            self._skip_ws()
            ch = self._peek()
            if ch == "*":
                self.pos += 1
                out = out * self._factor()
            elif ch == "(" or self._at_name() is not None:
                out = out * self._factor()
            else:
                return out

    def _factor(self) -> Word:
        atom = self._atom()
        self._skip_ws()
        if self._peek() == "^":
            self.pos += 1
            self._skip_ws()
            ch = self._peek()
            if ch in "-0123456789":
                return atom ** self._integer()
            exponent = self._atom()
            return atom.conjugate(exponent)
        return atom

    def _atom(self) -> Word:
        self._skip_ws()
        ch = self._peek()
        if ch == "(":
            open_pos = self.pos
            self.pos += 1
            inner = self._word()
            self._skip_ws()
            if self._peek() != ")":
                raise WordParseError("unclosed parenthesis", open_pos)
            self.pos += 1
            return inner
        idx = self._at_name()
        if idx is None:
            raise WordParseError("expected generator name or '('", self.pos)
        self.pos += len(self.name_strs[idx])
        return Word.gen(idx)

    def _at_name(self) -> int | None:
        self._skip_ws()
        for idx in self.names:
            if self.text.startswith(self.name_strs[idx], self.pos):
                return idx
        return None

    def _integer(self) -> int:
        start = self.pos
        if self._peek() == "-":
            self.pos += 1
        while self._peek().isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise WordParseError("expected integer", start)
        return int(self.text[start:self.pos])


def parse_word(text: str, names: Sequence[str]) -> Word:
    return _WordParser(text, names).parse()
