"""Integral lattices with an exact symmetric bilinear form.

A Lattice is Z^n equipped with an integer Gram matrix.  Vectors come in two
flavors: LatticeVector (integer coordinates) and RationalVector (Fraction
coordinates, living in the ambient rational quadratic space).  Both carry a
reference to their lattice so that cross-lattice arithmetic is rejected
instead of silently producing garbage.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .exact_linalg import IntMatrix, Rat, det

Coord = Union[int, Fraction]


@dataclass(frozen=True)
class Lattice:
    """Free Z-module of finite rank with an integer-valued pairing."""

    name: str
    gram: IntMatrix

    def __post_init__(self):
        if not self.gram.is_symmetric():
            raise ValueError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return self.gram.nrows

    @cached_property
    def _gram_entries(self) -> tuple[tuple[int, int, int], ...]:
        # sparse view of the Gram matrix, used by the pairing hot path
        return tuple(
            (i, j, g)
            for i, row in enumerate(self.gram.rows)
            for j, g in enumerate(row)
            if g
        )

    def pairing_coords(self, u: Sequence[Coord], v: Sequence[Coord]) -> Coord:
        if len(u) != self.rank or len(v) != self.rank:
            raise ValueError("coordinate length does not match lattice rank")
        return sum((g * u[i] * v[j] for i, j, g in self._gram_entries), start=0)

    def basis_vector(self, i: int) -> "LatticeVector":
        coords = [0] * self.rank
        coords[i] = 1
        return LatticeVector(self, tuple(coords))

    def vector(self, coords: Iterable[int]) -> "LatticeVector":
        return LatticeVector(self, tuple(coords))

    def rational_vector(self, coords: Iterable) -> "RationalVector":
        return RationalVector(self, tuple(Fraction(c) for c in coords))

    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    def is_unimodular(self) -> bool:
        return abs(det(self.gram)) == 1

    def signature(self) -> tuple[int, int]:
        """(positive, negative) inertia indices; error if degenerate."""
        n = self.rank
        a = [[Rat(x) for x in row] for row in self.gram.rows]
        pos = neg = 0
        for k in range(n):
            if a[k][k] == 0:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    raise ValueError("degenerate form")
                # symmetric row+column addition keeps the congruence class;
                # one of the signs makes the diagonal entry nonzero since
                # 2a[k][j] + a[j][j] and -2a[k][j] + a[j][j] cannot both vanish
                s = 1 if 2 * a[k][j] + a[j][j] != 0 else -1
                for i in range(n):
                    a[k][i] += s * a[j][i]
                for i in range(n):
                    a[i][k] += s * a[i][j]
            d = a[k][k]
            if d > 0:
                pos += 1
            else:
                neg += 1
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    f = a[i][k] / d
                    for j in range(k, n):
                        a[i][j] -= f * a[k][j]
                    for j in range(k, n):
                        a[j][i] -= f * a[j][k]
        return pos, neg

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Lattice)
            and self.name == other.name
            and self.gram.rows == other.gram.rows
        )

    def __hash__(self):
        return hash((self.name, self.gram.rows))

    def __repr__(self):
        return f"Lattice({self.name!r}, rank={self.rank})"


def _check_same_lattice(u, v):
    if u.lattice != v.lattice:
        raise ValueError(
            f"vectors from different lattices: {u.lattice.name} vs {v.lattice.name}"
        )


@dataclass(frozen=True)
class RationalVector:
    """Vector with Fraction coordinates in the rational span of a lattice."""

    lattice: Lattice
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise ValueError("coordinate length does not match lattice rank")
        object.__setattr__(
            self, "coords", tuple(Fraction(c) for c in self.coords)
        )

    def __add__(self, other):
        _check_same_lattice(self, other)
        return RationalVector(
            self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        _check_same_lattice(self, other)
        return RationalVector(
            self.lattice, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        return RationalVector(self.lattice, tuple(-a for a in self.coords))

    def scale(self, c) -> "RationalVector":
        c = Fraction(c)
        return RationalVector(self.lattice, tuple(c * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def to_lattice_vector(self) -> "LatticeVector":
        if not self.is_integral():
            raise ValueError("vector has non-integer coordinates")
        return LatticeVector(self.lattice, tuple(int(c) for c in self.coords))


@dataclass(frozen=True)
class LatticeVector:
    """Vector with integer coordinates in its lattice basis."""

    lattice: Lattice
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise ValueError("coordinate length does not match lattice rank")
        for c in self.coords:
            if not isinstance(c, int) or isinstance(c, bool):
                raise TypeError(f"integer coordinate expected, got {c!r}")

    def __add__(self, other):
        _check_same_lattice(self, other)
        return LatticeVector(
            self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        _check_same_lattice(self, other)
        return LatticeVector(
            self.lattice, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        return LatticeVector(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, c: int):
        if not isinstance(c, int):
            raise TypeError("scale a LatticeVector by an int (see to_rational)")
        return LatticeVector(self.lattice, tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def to_rational(self) -> RationalVector:
        return RationalVector(self.lattice, tuple(Fraction(c) for c in self.coords))


AnyVector = Union[LatticeVector, RationalVector]


def pairing(u: AnyVector, v: AnyVector) -> Coord:
    """Bilinear pairing (u, v); int when both vectors are integral."""
    _check_same_lattice(u, v)
    return u.lattice.pairing_coords(u.coords, v.coords)


def norm(v: AnyVector) -> Coord:
    """Self-pairing (v, v)."""
    return pairing(v, v)


# -- standard lattices ------------------------------------------------------

# Bourbaki numbering: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
_E8_EDGES = ((0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3))


def _e8_gram_rows() -> list[list[int]]:
    rows = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in _E8_EDGES:
        rows[i][j] = rows[j][i] = -1
    return rows


def make_H() -> Lattice:
    """Even unimodular hyperbolic plane."""
    return Lattice("H", IntMatrix([[0, 1], [1, 0]]))


def make_E8() -> Lattice:
    """Positive definite even unimodular lattice of rank 8 (Cartan matrix)."""
    return Lattice("E8", IntMatrix(_e8_gram_rows()))


def direct_sum(name: str, *parts: Lattice) -> Lattice:
    total = sum(p.rank for p in parts)
    rows = [[0] * total for _ in range(total)]
    off = 0
    for p in parts:
        for i in range(p.rank):
            for j in range(p.rank):
                rows[off + i][off + j] = p.gram[i, j]
        off += p.rank
    return Lattice(name, IntMatrix(rows))


def rescale(l: Lattice, c: int, name: str | None = None) -> Lattice:
    """Same module with the pairing multiplied by c."""
    return Lattice(
        name or f"{l.name}({c})",
        IntMatrix([[c * x for x in row] for row in l.gram.rows]),
    )


def make_K3() -> Lattice:
    """H + H + H + (-E8) + (-E8): rank 22, even, unimodular, signature (3,19)."""
    h = make_H()
    me8 = rescale(make_E8(), -1, "-E8")
    return direct_sum("K3", h, h, h, me8, me8)


@dataclass(frozen=True)
class HyperbolicTags:
    """Positions of the standard summands inside a direct-sum basis.

    e_index/f_index give the isotropic basis pair of each hyperbolic block;
    blocks lists the index ranges of the remaining definite summands.
    """

    hyperbolic: tuple[tuple[int, int], ...]
    blocks: tuple[tuple[int, ...], ...]

    def e_index(self, i: int) -> int:
        return self.hyperbolic[i][0]

    def f_index(self, i: int) -> int:
        return self.hyperbolic[i][1]


K3_TAGS = HyperbolicTags(
    hyperbolic=((0, 1), (2, 3), (4, 5)),
    blocks=(tuple(range(6, 14)), tuple(range(14, 22))),
)


def k3_e(l: Lattice, i: int) -> LatticeVector:
    """Isotropic generator e_i of the i-th hyperbolic block (i = 0, 1, 2)."""
    return l.basis_vector(K3_TAGS.e_index(i))


def k3_f(l: Lattice, i: int) -> LatticeVector:
    """Isotropic generator f_i with (e_i, f_i) = 1."""
    return l.basis_vector(K3_TAGS.f_index(i))


# -- JSON interchange -------------------------------------------------------


def lattice_to_json_dict(l: Lattice) -> dict:
    return {"rank": l.rank, "gram": [list(row) for row in l.gram.rows]}


def lattice_from_json_dict(data: dict, name: str = "lattice") -> Lattice:
    if not isinstance(data, dict) or "gram" not in data:
        raise ValueError("lattice JSON must be an object with a 'gram' field")
    gram = data["gram"]
    if not isinstance(gram, list) or not all(isinstance(r, list) for r in gram):
        raise ValueError("'gram' must be a list of integer rows")
    m = IntMatrix(gram)
    if m.nrows != m.ncols:
        raise ValueError("'gram' must be square")
    if "rank" in data and data["rank"] != m.nrows:
        raise ValueError("'rank' does not match the Gram matrix size")
    return Lattice(name, m)
