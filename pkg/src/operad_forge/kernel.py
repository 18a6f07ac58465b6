"""Exact scalars, permutations, shuffles and Koszul signs.

Every coefficient in the package is a :class:`fractions.Fraction`; the
alias :data:`Rational` exists so call sites read like the mathematics.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/4"`` to a Fraction.

    Floats are refused: they would silently smuggle rounding into an
    exact computation.
    """
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not accepted")
    return Fraction(value)


class Permutation:
    """A bijection of ``{1..n}`` stored by its images.

    ``p * q`` is the composite ``p o q`` (apply ``q`` first).
    """

    __slots__ = ("images", "_hash")

    def __init__(self, images: Iterable[int]):
        images = tuple(images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        self.images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for cycle in cycles:
            for a in cycle:
                if not 1 <= a <= n or a in seen:
                    raise ValueError(f"bad cycle {cycle} for n={n}")
                seen.add(a)
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a - 1] = b
        return cls(images)

    @classmethod
    def all(cls, n: int) -> Iterator["Permutation"]:
        """All of S_n in lexicographic order of image tuples."""
        for images in itertools.permutations(range(1, n + 1)):
            yield cls(images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if len(self) != len(other):
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(self.images[k - 1] for k in other.images)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for k, image in enumerate(self.images, start=1):
            inv[image - 1] = k
        return Permutation(inv)

    def sign(self) -> int:
        return koszul_sign(self, [1] * len(self))

    def is_identity(self) -> bool:
        return all(k == image for k, image in enumerate(self.images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest element."""
        seen: set[int] = set()
        out = []
        for start in range(1, len(self) + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            k = self(start)
            while k != start:
                cycle.append(k)
                seen.add(k)
                k = self(k)
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return f"Permutation.identity({len(self)})"
        text = "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)
        return f"Permutation[{len(self)}]{text}"


def koszul_sign(perm: Permutation, degrees: Sequence[int]) -> int:
    """Sign of rearranging graded symbols ``x_1..x_n`` into ``x_perm(1)..x_perm(n)``.

    Each pair of symbols whose relative order flips contributes
    ``(-1)^(|x_a| |x_b|)``.  Composition law:
    ``koszul_sign(t * s, d) == koszul_sign(s, [d[t(k)-1] ...]) * koszul_sign(t, d)``.
    """
    n = len(perm)
    if n != len(degrees):
        raise ValueError(f"permutation of size {n} applied to {len(degrees)} degrees")
    odd = [degrees[perm.images[k] - 1] % 2 for k in range(n)]
    images = perm.images
    flips = 0
    for a in range(n):
        if not odd[a]:
            continue
        ia = images[a]
        for b in range(a + 1, n):
            if odd[b] and images[b] < ia:
                flips += 1
    return -1 if flips % 2 else 1


def sort_sign(keys: Sequence, degrees: Sequence[int]) -> tuple[list[int], int]:
    """Stable argsort of ``keys`` plus the Koszul sign of that rearrangement.

    Returns 0-based positions in sorted order.
    """
    order = sorted(range(len(keys)), key=keys.__getitem__)
    flips = 0
    odd = [d % 2 for d in degrees]
    for a in range(len(order)):
        if not odd[order[a]]:
            continue
        for b in range(a + 1, len(order)):
            if odd[order[b]] and order[b] < order[a]:
                flips += 1
    return order, (-1 if flips % 2 else 1)


def shuffles(p: int, q: int) -> list[Permutation]:
    """All (p,q)-shuffles, lexicographic in their image tuples."""
    if p < 0 or q < 0:
        raise ValueError("shuffle sizes must be non-negative")
    n = p + q
    out = []
    for first in itertools.combinations(range(1, n + 1), p):
        rest = [k for k in range(1, n + 1) if k not in first]
        out.append(Permutation(list(first) + rest))
    out.sort(key=lambda s: s.images)
    return out
