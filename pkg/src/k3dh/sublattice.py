"""Sublattices: primitivity, saturation, orthogonal complements.

All three operations reduce to Smith normal form of small integer matrices,
so they are exact and deterministic.  A set of vectors spans a primitive
sublattice exactly when the elementary divisors of its coordinate matrix are
all 1; saturations and orthogonal complements are always returned with a
primitive (saturated) basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, lcm
from typing import Sequence

from .exact_linalg import IntMatrix, int_inverse, smith_normal_form
from .lattice import Lattice, LatticeVector, RationalVector, pairing


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of an ambient lattice, given by an ordered generator basis."""

    ambient: Lattice
    basis: tuple[LatticeVector, ...]

    def __post_init__(self):
        for v in self.basis:
            if v.lattice != self.ambient:
                raise ValueError("basis vector does not live in the ambient lattice")

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def coordinate_matrix(self) -> IntMatrix:
        return IntMatrix([v.coords for v in self.basis])

    @cached_property
    def divisors(self) -> tuple[int, ...]:
        """Nonzero elementary divisors of the coordinate matrix (cached)."""
        if not self.basis:
            return tuple()
        _, d, _ = smith_normal_form(self.coordinate_matrix)
        return tuple(
            d[i, i] for i in range(min(d.nrows, d.ncols)) if d[i, i] != 0
        )

    def is_independent(self) -> bool:
        return len(self.divisors) == self.rank

    def is_saturated(self) -> bool:
        return all(x == 1 for x in self.divisors)

    @cached_property
    def restricted_gram(self) -> IntMatrix:
        return IntMatrix(
            [[pairing(u, v) for v in self.basis] for u in self.basis]
        )

    def as_lattice(self, name: str) -> Lattice:
        return Lattice(name, self.restricted_gram)

    def member_from_coefficients(self, coeffs: Sequence[int]) -> LatticeVector:
        """Ambient vector with the given coefficients in this basis."""
        if len(coeffs) != self.rank:
            raise ValueError("coefficient length does not match sublattice rank")
        out = self.ambient.vector([0] * self.ambient.rank)
        for c, b in zip(coeffs, self.basis):
            out = out + c * b
        return out


def integral_primitive(v: RationalVector | LatticeVector) -> LatticeVector:
    """Scale a nonzero vector to integer coordinates with content 1."""
    if isinstance(v, LatticeVector):
        coords = v.coords
    else:
        scale = lcm(*(c.denominator for c in v.coords))
        coords = tuple(int(c * scale) for c in v.coords)
    g = 0
    for c in coords:
        g = gcd(g, c)
    if g == 0:
        raise ValueError("zero vector has no primitive rescaling")
    return LatticeVector(v.lattice, tuple(c // g for c in coords))


def is_primitive_vector(v: LatticeVector) -> bool:
    g = 0
    for c in v.coords:
        g = gcd(g, c)
    return g == 1


def is_primitive_embedding(vectors: Sequence[LatticeVector]) -> bool:
    """True when span(vectors) is a primitive sublattice (L/span torsion-free).

    Raises ValueError when the vectors are linearly dependent, since
    primitivity of an embedding is only meaningful for a basis.
    """
    if not vectors:
        return True
    sub = Sublattice(vectors[0].lattice, tuple(vectors))
    if not sub.is_independent():
        raise ValueError("vectors are linearly dependent")
    return sub.is_saturated()


def saturation(vectors: Sequence[LatticeVector]) -> Sublattice:
    """Smallest saturated sublattice containing the given vectors.

    The result's basis consists of rows of the inverse SNF column transform,
    so it is automatically primitive.
    """
    if not vectors:
        raise ValueError("saturation of the empty set is not defined")
    ambient = vectors[0].lattice
    sub = Sublattice(ambient, tuple(vectors))
    _, d, v = smith_normal_form(sub.coordinate_matrix)
    r = sum(
        1 for i in range(min(d.nrows, d.ncols)) if d[i, i] != 0
    )
    vinv = int_inverse(v)
    basis = tuple(ambient.vector(vinv.rows[i]) for i in range(r))
    out = Sublattice(ambient, basis)
    assert out.is_saturated()
    return out


def orthogonal_complement(
    ambient: Lattice, vectors: Sequence[LatticeVector | RationalVector]
) -> Sublattice:
    """All x in the lattice with (x, v) = 0 for every given v.

    The complement of any set is saturated by construction.  Rational input
    vectors are allowed (orthogonality only depends on their line).
    """
    if not vectors:
        return Sublattice(
            ambient, tuple(ambient.basis_vector(i) for i in range(ambient.rank))
        )
    ints = []
    for v in vectors:
        if v.lattice != ambient:
            raise ValueError("vector does not live in the ambient lattice")
        if all(c == 0 for c in v.coords):
            continue
        ints.append(integral_primitive(v))
    if not ints:
        return orthogonal_complement(ambient, [])
    # rows of m are the pairing functionals x -> (v_i, x)
    m = IntMatrix([v.coords for v in ints]).mul(ambient.gram)
    _, d, v_trans = smith_normal_form(m)
    r = sum(1 for i in range(min(d.nrows, d.ncols)) if d[i, i] != 0)
    cols = v_trans.transpose().rows  # columns of the transform
    basis = tuple(ambient.vector(cols[j]) for j in range(r, ambient.rank))
    out = Sublattice(ambient, basis)
    assert out.is_saturated()
    return out
