"""Free commutative monoids N^k marking graph vertices.

Elements model non-negative curve classes, homomorphisms model change of
marking along a map of targets, and linear forms evaluate (possibly negative)
intersection numbers against classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import RankMismatchError


@dataclass(frozen=True, order=True)
class MonoidElement:
    """Element of N^k as a tuple of non-negative integer coordinates."""

    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if any(c < 0 for c in self.coords):
            raise ValueError(f"negative coordinate in monoid element {self.coords}")

    @staticmethod
    def zero(rank: int) -> "MonoidElement":
        return MonoidElement((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "MonoidElement") -> "MonoidElement":
        if self.rank != other.rank:
            raise RankMismatchError(f"cannot add ranks {self.rank} and {other.rank}")
        return MonoidElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __bool__(self) -> bool:
        return not self.is_zero()


def add(a: MonoidElement, b: MonoidElement) -> MonoidElement:
    return a + b


def element(*coords: int) -> MonoidElement:
    """Shorthand constructor: element(1, 2) is (1,2) in N^2."""
    return MonoidElement(tuple(coords))


@dataclass(frozen=True)
class MonoidHom:
    """Homomorphism N^k -> N^m given by an m-by-k matrix of non-negative integers.

    Every monoid homomorphism between free commutative monoids is of this form,
    so the matrix is the whole datum.  The source rank is stored separately so
    that homs into N^0 (the one-point monoid) keep track of their domain.
    """

    rows: tuple[tuple[int, ...], ...]
    source_rank: int

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        for row in rows:
            if len(row) != self.source_rank:
                raise ValueError(f"row length {len(row)} != source rank {self.source_rank}")
            if any(x < 0 for x in row):
                raise ValueError("monoid homomorphism matrix must be non-negative")

    @staticmethod
    def identity(rank: int) -> "MonoidHom":
        return MonoidHom(tuple(tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank)), rank)

    @staticmethod
    def to_trivial(source_rank: int) -> "MonoidHom":
        """The unique homomorphism N^k -> N^0 forgetting all classes."""
        return MonoidHom((), source_rank)

    @property
    def target_rank(self) -> int:
        return len(self.rows)

    def __call__(self, a: MonoidElement) -> MonoidElement:
        return apply_hom(self, a)

    def compose(self, inner: "MonoidHom") -> "MonoidHom":
        """self o inner, defined when inner's target rank equals self's source rank."""
        if inner.target_rank != self.source_rank:
            raise RankMismatchError(
                f"cannot compose: inner target rank {inner.target_rank} != source rank {self.source_rank}"
            )
        rows = tuple(
            tuple(sum(row[i] * inner.rows[i][j] for i in range(inner.target_rank)) for j in range(inner.source_rank))
            for row in self.rows
        )
        return MonoidHom(rows, inner.source_rank)


def apply_hom(h: MonoidHom, a: MonoidElement) -> MonoidElement:
    if a.rank != h.source_rank:
        raise RankMismatchError(f"hom expects rank {h.source_rank}, got {a.rank}")
    return MonoidElement(tuple(sum(r * c for r, c in zip(row, a.coords)) for row in h.rows))


def enumerate_pair_decompositions(b: MonoidElement) -> list[tuple[MonoidElement, MonoidElement]]:
    """All ordered pairs (b1, b2) with b1 + b2 = b, lexicographic on b1.

    The list is complete, has no repetitions, and has exactly
    prod_j (b_j + 1) entries.
    """
    pairs = []
    for first in product(*(range(c + 1) for c in b.coords)):
        b1 = MonoidElement(first)
        b2 = MonoidElement(tuple(c - f for c, f in zip(b.coords, first)))
        pairs.append((b1, b2))
    return pairs


@dataclass(frozen=True)
class LinearForm:
    """Integer linear form on N^k; coefficients may be negative."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @staticmethod
    def zero(rank: int) -> "LinearForm":
        return LinearForm((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def __call__(self, a: MonoidElement) -> int:
        return eval_form(self, a)


def eval_form(f: LinearForm, a: MonoidElement) -> int:
    if f.rank != a.rank:
        raise RankMismatchError(f"form rank {f.rank} != element rank {a.rank}")
    return sum(c * x for c, x in zip(f.coeffs, a.coords))
