"""Independent reference procedures for surface group words.

Words are tuples of nonzero integers: ``+i`` is generator ``i`` (1-based) and
``-i`` its inverse.  Everything here is deliberately simple and quadratic at
worst; it exists to cross-check the linear-time engine.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

__all__ = [
    "Presentation",
    "UnsupportedPresentation",
    "Verdict",
    "word_from_darts",
    "word_from_letters",
    "letters",
    "inverse",
    "free_reduce",
    "cyclic_reduce",
    "max_piece",
    "dehn_reduce",
    "dehn_trivial",
    "abelianize",
    "brute_conjugate",
    "klein_normal_form",
    "klein_conjugate",
    "klein_multiply",
    "klein_brute_conjugate",
]

Word = tuple[int, ...]


class UnsupportedPresentation(ValueError):
    """The presentation is outside the regime where Dehn's algorithm is valid."""


class Verdict(enum.Enum):
    YES = "yes"
    NO_CERTIFICATE = "no-certificate"


def word_from_darts(darts) -> Word:
    return tuple(-((d >> 1) + 1) if d & 1 else (d >> 1) + 1 for d in darts)


def word_from_letters(text: str) -> Word:
    out = []
    for ch in text:
        if ch.isalpha():
            i = ord(ch.lower()) - ord("a") + 1
            out.append(-i if ch.isupper() else i)
    return tuple(out)


def letters(w: Word) -> str:
    return "".join(
        chr(ord("a") + abs(x) - 1).upper() if x < 0 else chr(ord("a") + x - 1) for x in w
    )


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(w) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i > 1 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def _rotations(r: Word):
    return [r[i:] + r[:i] for i in range(len(r))]


def max_piece(relator: Word) -> int:
    """Longest word occurring at two different places among the rotations of ``r^±1``."""
    conj = _rotations(relator) + _rotations(inverse(relator))
    best = 0
    n = len(relator)
    for a, b in itertools.combinations(conj, 2):
        k = 0
        while k < n and a[k] == b[k]:
            k += 1
        best = max(best, k)
    return best


@dataclass(frozen=True)
class Presentation:
    """One-relator surface group presentation."""

    relator: Word
    orientable: bool
    genus: int

    @classmethod
    def canonical(cls, genus: int, orientable: bool = True) -> "Presentation":
        if orientable:
            rel = []
            for i in range(genus):
                a, b = 2 * i + 1, 2 * i + 2
                rel += [a, b, -a, -b]
        else:
            rel = [x for i in range(genus) for x in (i + 1, i + 1)]
        return cls(tuple(rel), orientable, genus)

    @classmethod
    def from_relator(cls, relator: Word) -> "Presentation":
        rel = tuple(relator)
        gens = {abs(x) for x in rel}
        orientable = all(-x in rel for x in rel)
        genus = len(gens) // 2 if orientable else len(gens)
        return cls(rel, orientable, genus)

    @property
    def rank(self) -> int:
        return len({abs(x) for x in self.relator})

    def dehn_supported(self) -> bool:
        return len(self.relator) > 0 and 6 * max_piece(self.relator) < len(self.relator)


def _window_table(relator: Word):
    """Map each length-(|r|//2 + 1) factor of a relator conjugate to its complement."""
    n = len(relator)
    L = n // 2 + 1
    table: dict[Word, Word] = {}
    for rot in _rotations(relator) + _rotations(inverse(relator)):
        table[rot[:L]] = inverse(rot[L:])
    return L, table


_TABLES: dict[Word, tuple[int, dict]] = {}


def dehn_reduce(w, pres: Presentation) -> Word:
    """Apply Dehn replacements until none applies; returns the reduced word."""
    if not pres.dehn_supported():
        raise UnsupportedPresentation(
            f"Dehn's algorithm is not valid for relator {letters(pres.relator)}"
        )
    if pres.relator not in _TABLES:
        _TABLES[pres.relator] = _window_table(pres.relator)
    L, table = _TABLES[pres.relator]
    n = len(pres.relator)
    w = list(free_reduce(w))
    i = 0
    while i + L <= len(w):
        rep = table.get(tuple(w[i:i + L]))
        if rep is None:
            i += 1
            continue
        w[i:i + L] = rep
        before = len(w)
        w = list(free_reduce(w))
        # cancellation can cascade left of the replaced factor
        i = max(0, i - (before - len(w)) // 2 - n)
    return tuple(w)


def dehn_trivial(w, pres: Presentation) -> bool:
    return not dehn_reduce(w, pres)


def abelianize(w, pres: Presentation | int) -> tuple[int, ...]:
    rank = pres if isinstance(pres, int) else pres.rank
    vec = [0] * rank
    for x in w:
        vec[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(vec)


def _reduced_words(rank: int, max_len: int):
    yield ()
    frontier = [()]
    gens = [x for i in range(1, rank + 1) for x in (i, -i)]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for x in gens:
                if w and w[-1] == -x:
                    continue
                nw = w + (x,)
                nxt.append(nw)
                yield nw
        frontier = nxt


def brute_conjugate(w1, w2, pres: Presentation, bound: int) -> Verdict:
    """Search for ``g`` with ``|g| <= bound`` and ``g w1 g^-1 = w2``."""
    w1, w2 = tuple(w1), tuple(w2)
    tail = inverse(w2)
    for g in _reduced_words(pres.rank, bound):
        if dehn_trivial(g + w1 + inverse(g) + tail, pres):
            return Verdict.YES
    return Verdict.NO_CERTIFICATE


def klein_normal_form(w) -> tuple[int, int]:
    """Exponents ``(u, v)`` with ``w = a^u b^v`` in ``<a, b | a b a b^-1>``."""
    u = v = 0
    for x in w:
        if abs(x) == 1:
            u += (1 if x > 0 else -1) * (-1 if v % 2 else 1)
        elif abs(x) == 2:
            v += 1 if x > 0 else -1
        else:
            raise ValueError("Klein bottle words use generators a and b only")
    return u, v


def klein_conjugate(u: int, v: int, u2: int, v2: int) -> bool:
    """Conjugacy of ``a^u b^v`` and ``a^u2 b^v2`` in the Klein bottle group.

    ``v`` is a conjugacy invariant (it is the free part of the abelianization).
    Conjugating by ``a`` shifts ``u`` by 2 when ``v`` is odd; conjugating by
    ``b`` negates ``u`` for every ``v``.
    """
    if v != v2:
        return False
    if v % 2 == 0:
        return u == u2 or u == -u2
    return (u - u2) % 2 == 0


def klein_multiply(x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    """Product of normal forms: ``a^u b^v a^u' b^v' = a^(u + (-1)^v u') b^(v + v')``."""
    u, v = x
    u2, v2 = y
    return u + (-u2 if v % 2 else u2), v + v2


def klein_brute_conjugate(x: tuple[int, int], y: tuple[int, int], bound: int) -> bool:
    """Search conjugators ``a^i b^j`` with ``|i|, |j| <= bound``."""
    for i in range(-bound, bound + 1):
        for j in range(-bound, bound + 1):
            g = (i, j)
            g_inv = (-i if j % 2 == 0 else i, -j)
            if klein_multiply(klein_multiply(g, x), g_inv) == y:
                return True
    return False
