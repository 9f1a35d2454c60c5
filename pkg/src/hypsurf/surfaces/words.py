"""Words over surface-group generators.

Letters are signed 1-based generator indices: ``k`` is generator k and
``-k`` its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from hypsurf.core.hyp import Mat2
from hypsurf.errors import InvalidParameter


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise InvalidParameter("0 is not a generator letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    w = list(free_reduce(letters))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


@dataclass(frozen=True, slots=True)
class Word:
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", free_reduce(self.letters))

    @classmethod
    def of(cls, *letters: int) -> Word:
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple(-x for x in reversed(self.letters)))

    def power(self, k: int) -> Word:
        if k < 0:
            return self.inverse().power(-k)
        return Word(self.letters * k)

    def encode(self) -> str:
        """Comma-free text form, e.g. ``1.2.-1.-2``; the empty word is ``e``."""
        return ".".join(str(x) for x in self.letters) if self.letters else "e"

    @classmethod
    def decode(cls, text: str) -> Word:
        text = text.strip()
        if text in ("", "e"):
            return cls()
        return cls(tuple(int(x) for x in text.split(".")))

    def __str__(self) -> str:
        return self.encode()


def evaluate_word(word: Word | Sequence[int], generators: Sequence[Mat2]) -> Mat2:
    """Product of the letters' matrices, left to right."""
    inverses = [g.inverse() for g in generators]
    out = Mat2.identity()
    for x in word:
        k = abs(x)
        if not 1 <= k <= len(generators):
            raise InvalidParameter(f"letter {x} out of range for {len(generators)} generators")
        out = out @ (generators[k - 1] if x > 0 else inverses[k - 1])
    return out
