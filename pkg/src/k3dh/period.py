"""Period-domain membership and oriented positive 3-planes.

A period point is kept in real/imaginary normal form: two rational
vectors re, im with (re, im) = 0 and (re, re) = (im, im) > 0.  With that
normalization every hermitian quantity needed here collapses to plain
rational arithmetic: the hermitian norm of the line is
(re, re) + (im, im), and the squared modulus of the pairing of a vector
k against the line is (k, re)^2 + (k, im)^2.  All predicates below are
exact; there is no epsilon anywhere.
"""

from dataclasses import dataclass
from fractions import Fraction

from .exact_linalg import RatMatrix, rat_det
from .lattice import (
    Lattice,
    LatticeVector,
    RationalVector,
    k3_e,
    k3_f,
    norm,
    pairing,
)
from .shortvec import is_generic_plane

Vec = LatticeVector | RationalVector


def _rational(v: Vec) -> RationalVector:
    return v.to_rational() if isinstance(v, LatticeVector) else v


def is_in_omega(re: Vec, im: Vec) -> bool:
    """True iff re + i*im spans a positive isotropic complex line."""
    return pairing(re, im) == 0 and norm(re) == norm(im) and norm(re) > 0


@dataclass(frozen=True)
class PeriodPoint:
    re: RationalVector
    im: RationalVector

    def __post_init__(self):
        object.__setattr__(self, "re", _rational(self.re))
        object.__setattr__(self, "im", _rational(self.im))
        if not is_in_omega(self.re, self.im):
            raise ValueError(
                "not a period point: need (re,im) = 0 and (re,re) = (im,im) > 0"
            )

    @property
    def lattice(self) -> Lattice:
        return self.re.lattice

    def hermitian_norm(self) -> Fraction:
        return Fraction(norm(self.re) + norm(self.im))

    def pairing_square(self, kappa: Vec) -> Fraction:
        """Squared modulus of the pairing of kappa with the complex line."""
        return Fraction(
            pairing(kappa, self.re) ** 2 + pairing(kappa, self.im) ** 2
        )


def project_to_alpha_perp(kappa: Vec, point: PeriodPoint) -> RationalVector:
    """Orthogonal projection of kappa away from span(re, im), exactly."""
    k = _rational(kappa)
    cr = Fraction(pairing(k, point.re)) / norm(point.re)
    ci = Fraction(pairing(k, point.im)) / norm(point.im)
    out = k - point.re.scale(cr) - point.im.scale(ci)
    assert pairing(out, point.re) == 0 and pairing(out, point.im) == 0
    return out


def is_in_k_omega(kappa: Vec, point: PeriodPoint) -> bool:
    """Positive vector orthogonal to the period line."""
    return (
        norm(kappa) > 0
        and pairing(kappa, point.re) == 0
        and pairing(kappa, point.im) == 0
    )


def is_in_ktilde_omega(kappa: Vec, point: PeriodPoint) -> bool:
    """Positive projection: (k,k) * hermitian_norm > 2 * |(k, line)|^2.

    Equivalent to the projection of kappa landing strictly inside the
    positive cone orthogonal to the line; the equivalence is asserted.
    """
    lhs = norm(kappa) * point.hermitian_norm()
    rhs = 2 * point.pairing_square(kappa)
    member = lhs > rhs
    assert member == is_in_k_omega(project_to_alpha_perp(kappa, point), point)
    return member


def is_in_k_omega_generic(kappa: Vec, point: PeriodPoint) -> bool:
    """Membership plus no -2-vector orthogonal to span(kappa, re, im)."""
    if not is_in_k_omega(kappa, point):
        return False
    k = _rational(kappa)
    return is_generic_plane(k.lattice, [k, point.re, point.im])


def is_in_ktilde_omega_generic(kappa: Vec, point: PeriodPoint) -> bool:
    """Membership plus no -2-vector orthogonal to span(kappa, re, im)."""
    if not is_in_ktilde_omega(kappa, point):
        return False
    k = _rational(kappa)
    return is_generic_plane(k.lattice, [k, point.re, point.im])


@dataclass(frozen=True)
class OrientedPlane:
    """Ordered basis of a positive-definite 3-plane; order is orientation."""

    basis: tuple[RationalVector, RationalVector, RationalVector]

    def __post_init__(self):
        basis = tuple(_rational(v) for v in self.basis)
        if len(basis) != 3:
            raise ValueError("need exactly three spanning vectors")
        object.__setattr__(self, "basis", basis)
        g = self.gram()
        # Sylvester criterion, leading principal minors
        for k in (1, 2, 3):
            if rat_det(RatMatrix([row[:k] for row in g[:k]])) <= 0:
                raise ValueError("basis does not span a positive 3-plane")

    @property
    def lattice(self) -> Lattice:
        return self.basis[0].lattice

    def gram(self) -> list[list[Fraction]]:
        return [
            [Fraction(pairing(u, v)) for v in self.basis] for u in self.basis
        ]


def plane_of(kappa: Vec, point: PeriodPoint) -> OrientedPlane:
    """Oriented plane with basis (kappa, re, im); requires membership."""
    if not is_in_ktilde_omega(kappa, point):
        raise ValueError("pair does not span a positive 3-plane")
    return OrientedPlane((_rational(kappa), point.re, point.im))


def same_component(p: OrientedPlane, q: OrientedPlane) -> bool:
    """Co-orientation test for maximal positive planes.

    The mutual pairing matrix of two maximal positive subspaces is
    nonsingular, and its determinant sign is constant on components of
    the oriented Grassmannian, positive exactly on the diagonal.
    """
    d = rat_det(
        RatMatrix([[pairing(u, v) for v in q.basis] for u in p.basis])
    )
    if d == 0:
        raise ValueError("singular mutual pairing: planes are not both maximal positive")
    return d > 0


def standard_plane(lattice: Lattice) -> OrientedPlane:
    """Reference orientation: the diagonal vectors of the hyperbolic summands."""
    return OrientedPlane(
        tuple((k3_e(lattice, i) + k3_f(lattice, i)).to_rational() for i in range(3))
    )
