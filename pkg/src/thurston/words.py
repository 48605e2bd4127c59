"""Reduced words in the free group F2 = <a, b>.

Elements of <T_A, T_B> are stored as run-length syllables ``(base, exponent)``
with ``base`` in ``{"a", "b"}``.  A stored word is always fully reduced:
adjacent syllables have distinct bases and no exponent is zero.

Text syntax: lowercase letters are generators, uppercase their inverses, so
``"abAB"`` is the commutator a b a^-1 b^-1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import InputError

BASES = ("a", "b")

Syllable = tuple[str, int]


class Generator(NamedTuple):
    base: str
    sign: int

    @classmethod
    def from_char(cls, ch: str) -> "Generator":
        if ch in ("a", "b"):
            return cls(ch, 1)
        if ch in ("A", "B"):
            return cls(ch.lower(), -1)
        raise InputError(f"invalid letter {ch!r}; expected one of a, b, A, B")

    def __str__(self) -> str:
        return self.base if self.sign > 0 else self.base.upper()


GENERATORS = tuple(Generator.from_char(c) for c in "aAbB")


class ElementClass(str, enum.Enum):
    """Word-level conjugacy type of an element of <T_A, T_B> = F2."""

    IDENTITY = "identity"
    CONJ_A = "conj_a"
    CONJ_B = "conj_b"
    CONJ_AB = "conj_ab"
    PSEUDO_ANOSOV = "pseudo_anosov"


class AbelianImage(NamedTuple):
    p: int
    q: int

    def __add__(self, other):  # type: ignore[override]
        return AbelianImage(self.p + other.p, self.q + other.q)


@dataclass(frozen=True)
class Word:
    syllables: tuple[Syllable, ...] = ()

    def __post_init__(self):
        prev = None
        for base, exp in self.syllables:
            if base not in BASES:
                raise InputError(f"unknown base {base!r}")
            if exp == 0:
                raise InputError("zero exponent in syllable list")
            if base == prev:
                raise InputError("adjacent syllables share a base; word is not reduced")
            prev = base

    @classmethod
    def from_syllables(cls, syllables: Iterable[Syllable]) -> "Word":
        """Build a word from arbitrary syllables, reducing as needed."""
        buf: list[Syllable] = []
        for base, exp in syllables:
            if exp:
                _push(buf, base, int(exp))
        return cls(tuple(buf))

    def letters(self) -> list[Generator]:
        out = []
        for base, exp in self.syllables:
            g = Generator(base, 1 if exp > 0 else -1)
            out.extend([g] * abs(exp))
        return out

    def is_identity(self) -> bool:
        return not self.syllables

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return inverse(self)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return inverse(self) ** (-k)
        buf: list[Syllable] = []
        for _ in range(k):
            for base, exp in self.syllables:
                _push(buf, base, exp)
        return Word(tuple(buf))

    def __str__(self) -> str:
        return "".join(
            (base if exp > 0 else base.upper()) * abs(exp) for base, exp in self.syllables
        )

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


IDENTITY = Word()


def _push(buf: list[Syllable], base: str, exp: int) -> None:
    # Appends one syllable to a reduced buffer, merging or cancelling at the end.
    if buf and buf[-1][0] == base:
        e = buf[-1][1] + exp
        if e:
            buf[-1] = (base, e)
        else:
            buf.pop()
    else:
        buf.append((base, exp))


def append_in_place(buf: list[Syllable], syllables: Sequence[Syllable]) -> None:
    """Right-multiply the reduced buffer ``buf`` by a reduced syllable list."""
    for base, exp in syllables:
        _push(buf, base, exp)


def parse_word(text: str) -> Word:
    """Parse the ``{a, b, A, B}`` text syntax into a reduced word."""
    return reduce(Generator.from_char(ch) for ch in text.strip())


def reduce(letters: Iterable[Generator | str]) -> Word:
    buf: list[Syllable] = []
    for g in letters:
        if isinstance(g, str):
            g = Generator.from_char(g)
        _push(buf, g.base, g.sign)
    return Word(tuple(buf))


def concat(u: Word, v: Word) -> Word:
    buf = list(u.syllables)
    append_in_place(buf, v.syllables)
    return Word(tuple(buf))


def inverse(w: Word) -> Word:
    return Word(tuple((base, -exp) for base, exp in reversed(w.syllables)))


def conjugate(g: Word, w: Word) -> Word:
    """Return g w g^-1."""
    return concat(concat(g, w), inverse(g))


def _core_bounds(syls: Sequence[Syllable]) -> tuple[int, int, int | None]:
    """Locate the cyclic core of a reduced syllable sequence without copying.

    Returns ``(i, j, merged)``.  With ``merged is None`` the core is
    ``syls[i:j+1]`` (empty iff ``i > j``).  Otherwise the outer syllables
    ``syls[i]`` and ``syls[j]`` share a base and partially cancel; the core is
    ``(base, merged)`` followed by ``syls[i+1:j]``.
    """
    i, j = 0, len(syls) - 1
    while i < j:
        bi, ei = syls[i]
        bj, ej = syls[j]
        if bi != bj:
            return i, j, None
        if ei + ej:
            return i, j, ei + ej
        i += 1
        j -= 1
    return i, j, None


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conjugator * core * conjugator^-1`` with ``core`` cyclically reduced."""
    syls = w.syllables
    i, j, merged = _core_bounds(syls)
    if merged is None:
        return Word(syls[i : j + 1]), Word(syls[:i])
    base = syls[i][0]
    core = ((base, merged),) + syls[i + 1 : j]
    conj = syls[:i] + ((base, -syls[j][1]),)
    return Word(core), Word(conj)


def word_norm(w: Word) -> int:
    return sum(abs(e) for _, e in w.syllables)


def syllables_cyclic_norm(syls: Sequence[Syllable]) -> int:
    i, j, merged = _core_bounds(syls)
    if merged is None:
        return sum(abs(syls[k][1]) for k in range(i, j + 1))
    return abs(merged) + sum(abs(syls[k][1]) for k in range(i + 1, j))


def cyclic_norm(w: Word) -> int:
    return syllables_cyclic_norm(w.syllables)


def classify_syllables(syls: Sequence[Syllable], mu_is_four: bool) -> ElementClass:
    """Classification of a reduced syllable sequence; see :func:`classify_element`."""
    if not syls:
        return ElementClass.IDENTITY
    i, j, merged = _core_bounds(syls)
    if i == j and merged is None:
        return ElementClass.CONJ_A if syls[i][0] == "a" else ElementClass.CONJ_B
    if mu_is_four:
        # A cyclically reduced core over two bases alternates, so it is a
        # rotation of (ab)^{+-k} exactly when all exponents are +1 or all -1.
        if merged is None:
            first, lo = syls[i][1], i + 1
        else:
            first, lo = merged, i + 1
        hi = j + 1 if merged is None else j
        if first in (1, -1) and all(syls[k][1] == first for k in range(lo, hi)):
            return ElementClass.CONJ_AB
    return ElementClass.PSEUDO_ANOSOV


def classify_element(w: Word, mu_is_four: bool) -> ElementClass:
    """Conjugacy-type classification of ``w`` in a free <T_A, T_B>.

    ``w`` is pseudo-Anosov unless a conjugate of it lies in <T_A> or <T_B>,
    or, when mu = 4, in <T_A T_B>.  The identity is reported separately.
    """
    return classify_syllables(w.syllables, mu_is_four)


def abelianize(w: Word) -> AbelianImage:
    p = q = 0
    for base, exp in w.syllables:
        if base == "a":
            p += exp
        else:
            q += exp
    return AbelianImage(p, q)


_NEXT_LETTERS = {
    g: tuple(h for h in GENERATORS if not (h.base == g.base and h.sign == -g.sign))
    for g in GENERATORS
}


def random_reduced_word(rng, length: int) -> Word:
    """Uniform random reduced word with exactly ``length`` letters.

    ``rng`` is a :class:`numpy.random.Generator`.  The first letter is uniform
    over the four generators; each later one is uniform over the three letters
    that do not cancel its predecessor.
    """
    if length <= 0:
        return IDENTITY
    first = int(rng.integers(0, 4))
    rest = rng.integers(0, 3, size=length - 1).tolist()
    g = GENERATORS[first]
    buf: list[Syllable] = [(g.base, g.sign)]
    for d in rest:
        g = _NEXT_LETTERS[g][d]
        _push(buf, g.base, g.sign)
    return Word(tuple(buf))


class WordBuffer:
    """Mutable reduced word with running letter count and abelian image.

    Used by the random-walk engine, where the current position is
    right-multiplied by an increment at every step.
    """

    __slots__ = ("syllables", "norm", "p", "q")

    def __init__(self, w: Word = IDENTITY):
        self.syllables: list[Syllable] = list(w.syllables)
        self.norm = word_norm(w)
        self.p, self.q = abelianize(w)

    def multiply(self, syls: Sequence[Syllable]) -> None:
        buf = self.syllables
        for base, exp in syls:
            if base == "a":
                self.p += exp
            else:
                self.q += exp
            if buf and buf[-1][0] == base:
                old = buf[-1][1]
                e = old + exp
                self.norm += abs(e) - abs(old)
                if e:
                    buf[-1] = (base, e)
                else:
                    buf.pop()
            else:
                buf.append((base, exp))
                self.norm += abs(exp)

    def cyclic_norm(self) -> int:
        syls = self.syllables
        i, j, merged = _core_bounds(syls)
        if i > j:
            return 0
        stripped = sum(abs(syls[k][1]) for k in range(i)) + sum(
            abs(syls[k][1]) for k in range(j + 1, len(syls))
        )
        if merged is not None:
            stripped += abs(syls[i][1]) + abs(syls[j][1]) - abs(merged)
        return self.norm - stripped

    def classify(self, mu_is_four: bool) -> ElementClass:
        return classify_syllables(self.syllables, mu_is_four)

    def abelian(self) -> AbelianImage:
        return AbelianImage(self.p, self.q)

    def to_word(self) -> Word:
        return Word(tuple(self.syllables))
