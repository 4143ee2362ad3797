"""Complete short-vector enumeration on definite Gram matrices.

The main enumerator is Fincke-Pohst on an exact rational LDL^T
decomposition.  All interval endpoints are floors/ceilings of exact
rational square-root expressions, so no admissible vector is ever lost to
rounding; a brute-force box search (naive_enumerate) serves as an
independent completeness oracle in the tests.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt
from typing import Sequence

from .exact_linalg import IntMatrix, Rat, rat_inverse
from .lattice import Lattice, LatticeVector, RationalVector
from .sublattice import Sublattice, orthogonal_complement

THREADS_ENV = "K3DH_THREADS"


class IndefiniteGramError(ValueError):
    """Raised when a Gram matrix is not (positive or negative) definite."""


def _ldl(gram: IntMatrix) -> tuple[list[Rat], list[list[Rat]]] | None:
    """Exact LDL^T data (d, c) with Q(x) = sum_i d_i (x_i + sum_{j>i} c_ij x_j)^2.

    Returns None when some pivot is <= 0 (not positive definite).
    """
    n = gram.nrows
    q = [[Rat(x) for x in row] for row in gram.rows]
    d = [Rat(0)] * n
    c = [[Rat(0)] * n for _ in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            return None
        d[i] = q[i][i]
        for j in range(i + 1, n):
            c[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[i][k] * q[i][l] / q[i][i]
                q[l][k] = q[k][l]
    return d, c


@dataclass(frozen=True)
class DefiniteGram:
    """Definite symmetric integer matrix, normalized to positive definite.

    `negated` records whether the input was negative definite, in which
    case target norms are negated on the way in.
    """

    matrix: IntMatrix
    negated: bool

    def __init__(self, matrix: IntMatrix):
        if not matrix.is_symmetric():
            raise IndefiniteGramError("Gram matrix must be symmetric")
        if matrix.nrows == 0:
            raise IndefiniteGramError("empty Gram matrix")
        if _ldl(matrix) is not None:
            object.__setattr__(self, "matrix", matrix)
            object.__setattr__(self, "negated", False)
            return
        neg = IntMatrix([[-x for x in row] for row in matrix.rows])
        if _ldl(neg) is not None:
            object.__setattr__(self, "matrix", neg)
            object.__setattr__(self, "negated", True)
            return
        raise IndefiniteGramError("Gram matrix is not definite")

    @property
    def rank(self) -> int:
        return self.matrix.nrows

    @cached_property
    def ldl(self) -> tuple[list[Rat], list[list[Rat]]]:
        data = _ldl(self.matrix)
        assert data is not None
        return data

    def norm_of(self, x: Sequence[int]) -> int:
        q = sum(
            self.matrix[i, j] * x[i] * x[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )
        return -q if self.negated else q


def _floor_plus_sqrt(t: Rat, r: Rat) -> int:
    """floor(t + sqrt(r)) for rationals with r >= 0, exactly."""
    assert r >= 0
    g = (t.numerator // t.denominator) + isqrt(int(r))
    # int(r) truncates toward zero = floor for r >= 0; adjust the estimate
    while True:
        step = g + 1 - t
        if step <= 0 or step * step <= r:
            g += 1
        else:
            break
    while True:
        step = g - t
        if step <= 0 or step * step <= r:
            break
        g -= 1
    return g


def _ceil_minus_sqrt(t: Rat, r: Rat) -> int:
    """ceil(t - sqrt(r)) for rationals with r >= 0, exactly."""
    return -_floor_plus_sqrt(-t, r)


def _enumerate_level(
    d: list[Rat],
    c: list[list[Rat]],
    i: int,
    rem: Rat,
    chosen: list[int],
    out: list[tuple[int, ...]],
) -> None:
    # chosen holds x_{i+1} .. x_{n-1} (chosen[j] = x_j)
    s = sum((c[i][j] * chosen[j] for j in range(i + 1, len(chosen))), start=Rat(0))
    r = rem / d[i]
    lo = _ceil_minus_sqrt(-s, r)
    hi = _floor_plus_sqrt(-s, r)
    for x in range(lo, hi + 1):
        term = d[i] * (x + s) ** 2
        rem2 = rem - term
        chosen[i] = x
        if i == 0:
            if rem2 == 0:
                out.append(tuple(chosen))
        else:
            _enumerate_level(d, c, i - 1, rem2, chosen, out)
    chosen[i] = 0


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be a positive integer") from exc
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return n


def enumerate_norm(gram: DefiniteGram, target: int) -> tuple[tuple[int, ...], ...]:
    """All integer vectors x with x^T G x = target, sorted lexicographically.

    `target` is interpreted in the sign convention of the original matrix
    (so -2 for a negative definite Gram).  The normalized target must be
    positive.
    """
    t = -target if gram.negated else target
    if t <= 0:
        raise ValueError("target norm must be nonzero with the sign of the form")
    d, c = gram.ldl
    n = gram.rank
    rem = Rat(t)
    threads = _thread_count()
    top = n - 1
    r = rem / d[top]
    lo = _ceil_minus_sqrt(Rat(0), r)
    hi = _floor_plus_sqrt(Rat(0), r)
    tops = list(range(lo, hi + 1))

    def run_chunk(chunk: list[int]) -> list[tuple[int, ...]]:
        found: list[tuple[int, ...]] = []
        chosen = [0] * n
        for x in chunk:
            chosen[top] = x
            rem2 = rem - d[top] * Rat(x) ** 2
            if n == 1:
                if rem2 == 0:
                    found.append(tuple(chosen))
            else:
                _enumerate_level(d, c, top - 1, rem2, chosen, found)
            chosen[top] = 0
        return found

    if threads == 1 or len(tops) < 2:
        results = run_chunk(tops)
    else:
        k = min(threads, len(tops))
        chunks = [tops[i::k] for i in range(k)]
        with ThreadPoolExecutor(max_workers=k) as pool:
            results = [v for part in pool.map(run_chunk, chunks) for v in part]
    return tuple(sorted(results))


def naive_enumerate(gram: DefiniteGram, target: int) -> tuple[tuple[int, ...], ...]:
    """Brute-force box search; independent oracle for enumerate_norm.

    Box radii come from the exact bound x_i^2 <= target * (G^{-1})_ii, which
    holds for every x with x^T G x <= target when G is positive definite.
    """
    t = -target if gram.negated else target
    if t <= 0:
        raise ValueError("target norm must be nonzero with the sign of the form")
    n = gram.rank
    ginv = rat_inverse(gram.matrix.to_rat())
    radii = [isqrt(int(t * ginv[i, i])) for i in range(n)]
    out = []
    x = [-r for r in radii]

    def q_of(x):
        return sum(
            gram.matrix[i, j] * x[i] * x[j] for i in range(n) for j in range(n)
        )

    while True:
        if q_of(x) == t:
            out.append(tuple(x))
        i = 0
        while i < n:
            x[i] += 1
            if x[i] <= radii[i]:
                break
            x[i] = -radii[i]
            i += 1
        if i == n:
            break
    return tuple(sorted(out))


def roots_orthogonal_to(
    lattice: Lattice, plane: Sequence[LatticeVector | RationalVector]
) -> tuple[LatticeVector, ...]:
    """All lattice vectors of self-pairing -2 orthogonal to the given plane.

    The plane must span a positive definite subspace; its orthogonal
    complement in a lattice of signature (p, q) with p = dim(plane) is then
    negative definite and the root search is a finite enumeration.
    """
    plane = list(plane)
    if plane:
        from .sublattice import integral_primitive

        ints = [integral_primitive(v) for v in plane]
        plane_gram = IntMatrix(
            [
                [lattice.pairing_coords(u.coords, v.coords) for v in ints]
                for u in ints
            ]
        )
        if DefiniteGram(plane_gram).negated:
            raise IndefiniteGramError("plane is not positive definite")
    comp = orthogonal_complement(lattice, plane)
    if comp.rank == 0:
        return tuple()
    dg = DefiniteGram(comp.restricted_gram)
    if not dg.negated:
        raise IndefiniteGramError("orthogonal complement is not negative definite")
    coords = enumerate_norm(dg, -2)
    roots = tuple(comp.member_from_coefficients(c) for c in coords)
    for r in roots:
        assert lattice.pairing_coords(r.coords, r.coords) == -2
    return roots


def is_generic_plane(
    lattice: Lattice, plane: Sequence[LatticeVector | RationalVector]
) -> bool:
    """True when no -2-vector of the lattice is orthogonal to the plane."""
    return len(roots_orthogonal_to(lattice, plane)) == 0
