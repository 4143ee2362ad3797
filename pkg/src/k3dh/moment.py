"""Duistermaat-Heckman data for 6-dimensional circle actions.

A DHPolynomial is the volume of the reduced space as a function of the
moment value, here always of degree at most two with exact rational
coefficients.  A GluedModel chains open intervals of regular values
(pieces) across walls of isolated fixed points, optionally closing up into
a circle-valued moment map, and validate() replays every numerical
compatibility the gluing has to satisfy.

The wall-crossing constant in dimension 6 is (t - level)^2 / (w1 w2 w3)
per fixed point with weights (w1, w2, w3); it is calibrated against the
two branch polynomials of the packaged reference model, and the
calibration is itself a test.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .isometry import lemma_iso
from .kummer import KummerClass
from .kummer import pairing as kummer_pairing
from .lattice import LatticeVector, k3_e, k3_f, make_K3, norm, pairing
from .sublattice import is_primitive_embedding

REPORT_SCHEMA_VERSION = 1


class ModelError(Exception):
    """Structurally malformed model or model file."""


def rational_to_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rational_from_json(v) -> Fraction:
    """Exact rational from an int or a 'p/q' string; floats are refused."""
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ModelError(f"not an exact rational: {v!r}")
    try:
        return Fraction(v) if isinstance(v, int) else Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"not an exact rational: {v!r}") from exc


@dataclass(frozen=True)
class DHPolynomial:
    """c0 + c1 t + c2 t^2 with exact rational coefficients."""

    c0: Fraction
    c1: Fraction
    c2: Fraction

    def __post_init__(self):
        for name in ("c0", "c1", "c2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.c0, self.c1, self.c2)

    def evaluate(self, t) -> Fraction:
        t = Fraction(t)
        return self.c0 + self.c1 * t + self.c2 * t * t

    def __add__(self, other: "DHPolynomial") -> "DHPolynomial":
        return DHPolynomial(
            self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2
        )

    def __sub__(self, other: "DHPolynomial") -> "DHPolynomial":
        return self + (-other)

    def __neg__(self) -> "DHPolynomial":
        return DHPolynomial(-self.c0, -self.c1, -self.c2)

    def translate(self, s) -> "DHPolynomial":
        """The polynomial t -> p(t - s)."""
        s = Fraction(s)
        return DHPolynomial(
            self.c0 - self.c1 * s + self.c2 * s * s,
            self.c1 - 2 * self.c2 * s,
            self.c2,
        )

    def is_even_integral(self) -> bool:
        return all(
            c.denominator == 1 and c.numerator % 2 == 0
            for c in self.coefficients
        )

    def is_zero(self) -> bool:
        return self.coefficients == (0, 0, 0)

    def __str__(self):
        return "(" + ", ".join(rational_to_str(c) for c in self.coefficients) + ")"


def dh_from_pair(kappa, eta) -> DHPolynomial:
    """Exact coefficients ((kappa,kappa), -2(kappa,eta), (eta,eta)).

    Accepts two lattice vectors or two blowup classes; a mixed pair or a
    cross-lattice pair is rejected.
    """
    in_blowup = isinstance(kappa, KummerClass)
    if in_blowup != isinstance(eta, KummerClass):
        raise ValueError("class pair lives in two different spaces")
    pair = kummer_pairing if in_blowup else pairing
    return DHPolynomial(
        pair(kappa, kappa), -2 * pair(kappa, eta), pair(eta, eta)
    )


_K3 = make_K3()


def pair_from_polynomial(p: DHPolynomial) -> tuple[LatticeVector, LatticeVector]:
    """A standard-coordinate class pair whose DH polynomial is p.

    Writing p = 2l0 + 2l1 t + 2l2 t^2, the pair is e1 + l0 f1 and
    -l1 f1 + e2 + l2 f2.  Both unit hyperbolic coefficients survive into
    the pairing matrix against (f1, f2), so the span is always saturated.
    """
    if not p.is_even_integral():
        raise ValueError("coefficients must be even integers")
    l0, l1, l2 = (c.numerator // 2 for c in p.coefficients)
    kappa = k3_e(_K3, 0) + l0 * k3_f(_K3, 0)
    eta = -l1 * k3_f(_K3, 0) + k3_e(_K3, 1) + l2 * k3_f(_K3, 1)
    return kappa, eta


def is_positive_on(p: DHPolynomial, a, b) -> bool:
    """Exact strict positivity on the closed interval [a, b]."""
    a, b = Fraction(a), Fraction(b)
    if a > b:
        raise ValueError("empty interval")
    if p.evaluate(a) <= 0 or p.evaluate(b) <= 0:
        return False
    if p.c2 != 0:
        vertex = -p.c1 / (2 * p.c2)
        if a < vertex < b and p.evaluate(vertex) <= 0:
            return False
    return True


def _positive_on_open(p: DHPolynomial, lo, hi) -> bool:
    """Strict positivity on the open interval; None means unbounded."""
    if p.is_zero():
        return False
    if lo is not None and p.evaluate(lo) < 0:
        return False
    if hi is not None and p.evaluate(hi) < 0:
        return False
    if p.c2 == 0 and p.c1 == 0:
        return p.c0 > 0
    if p.c2 == 0:
        # a linear function loses to whichever unbounded side it falls off
        if lo is None and p.c1 > 0:
            return False
        if hi is None and p.c1 < 0:
            return False
        return True
    vertex = -p.c1 / (2 * p.c2)
    inside = (lo is None or lo < vertex) and (hi is None or vertex < hi)
    if p.c2 > 0:
        return not inside or p.evaluate(vertex) > 0
    # concave: boundary values already pin the interior, unbounded sides lose
    return lo is not None and hi is not None


@dataclass(frozen=True)
class Wall:
    """Isolated fixed points at one moment level, crossed in increasing t."""

    level: Fraction
    count: int
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "level", Fraction(self.level))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.weights) != 3:
            raise ValueError("expected three weights")  # dimension 6 throughout
        if any(w == 0 for w in self.weights):
            raise ValueError("weights must be nonzero")
        if self.count < 0:
            raise ValueError("negative fixed point count")


def wall_crossing_delta(w: Wall) -> DHPolynomial:
    """Jump of the DH polynomial across the wall: after minus before."""
    c = Fraction(w.count, w.weights[0] * w.weights[1] * w.weights[2])
    return DHPolynomial(c * w.level * w.level, -2 * c * w.level, c)


@dataclass(frozen=True)
class Piece:
    """One open interval of regular values with its reduced-space data.

    Endpoints are rational, or None on an unbounded side.  When a class
    pair is present, its second member is the Euler class of the circle
    bundle over the reduced space.
    """

    lo: object
    hi: object
    dh: DHPolynomial
    class_pair: tuple | None = None
    reduced_space: str = "K3"

    def __post_init__(self):
        lo = None if self.lo is None else Fraction(self.lo)
        hi = None if self.hi is None else Fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo is not None and hi is not None and lo >= hi:
            raise ValueError("empty interval")
        if self.reduced_space not in ("K3", "Kummer"):
            raise ValueError("unknown reduced space tag")
        if self.class_pair is not None:
            pair = tuple(self.class_pair)
            if len(pair) != 2:
                raise ValueError("class pair must have two members")
            object.__setattr__(self, "class_pair", pair)

    def interval_str(self) -> str:
        lo = "-inf" if self.lo is None else rational_to_str(self.lo)
        hi = "inf" if self.hi is None else rational_to_str(self.hi)
        return f"({lo}, {hi})"


@dataclass(frozen=True)
class GluedModel:
    """Pieces separated by walls, on a line or (with period set) a circle."""

    pieces: tuple
    walls: tuple
    period: Fraction | None = None
    fixed_points: int | None = None
    name: str = "model"

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "walls", tuple(self.walls))
        if self.period is not None:
            object.__setattr__(self, "period", Fraction(self.period))


@dataclass(frozen=True)
class Check:
    """One verified statement; passed is exactly `expected == computed`."""

    check_id: str
    description: str
    claim: str
    expected: str
    computed: str
    passed: bool


def make_check(check_id: str, description: str, claim: str, expected, computed) -> Check:
    e, c = str(expected), str(computed)
    return Check(check_id, description, claim, e, c, e == c)


@dataclass(frozen=True)
class Report:
    title: str
    checks: tuple

    @property
    def passed_count(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def failed_count(self) -> int:
        return len(self.checks) - self.passed_count

    def all_passed(self) -> bool:
        return self.failed_count == 0

    def to_json_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "title": self.title,
            "checks": [
                {
                    "id": c.check_id,
                    "description": c.description,
                    "claim": c.claim,
                    "expected": c.expected,
                    "computed": c.computed,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "summary": {
                "total": len(self.checks),
                "passed": self.passed_count,
                "failed": self.failed_count,
            },
        }

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            out.append(
                f"[{mark}] {c.check_id}: {c.description} "
                f"(expected {c.expected}, got {c.computed})"
            )
        out.append(
            f"{self.title}: {self.passed_count}/{len(self.checks)} checks passed"
        )
        return out


def _check_structure(model: GluedModel) -> None:
    pieces, walls = model.pieces, model.walls
    if not pieces:
        raise ModelError("model has no pieces")
    periodic = model.period is not None
    expected_walls = len(pieces) if periodic else len(pieces) - 1
    if len(walls) != expected_walls:
        raise ModelError(
            f"expected {expected_walls} walls for {len(pieces)} pieces, got {len(walls)}"
        )
    if periodic and model.period <= 0:
        raise ModelError("period must be positive")
    for i in range(len(pieces) - 1):
        level = walls[i].level
        if pieces[i].hi != level or pieces[i + 1].lo != level:
            raise ModelError(f"wall {i} level does not match piece endpoints")
    if periodic:
        if any(p.lo is None or p.hi is None for p in pieces):
            raise ModelError("periodic model cannot have unbounded pieces")
        wrap = walls[-1]
        if pieces[-1].hi != wrap.level:
            raise ModelError("wrap wall level does not match the last piece")
        if pieces[0].lo != wrap.level - model.period:
            raise ModelError("pieces do not tile one full period")


def validate(model: GluedModel) -> Report:
    """Replay every numerical compatibility of the glued model.

    Raises ModelError on structural malformation; every mathematical
    failure is a report entry instead.  Wall jumps are oriented after
    minus before in increasing t, the wrap wall comparing against the
    first piece shifted up by one period.
    """
    _check_structure(model)
    checks: list[Check] = []
    pieces, walls = model.pieces, model.walls
    periodic = model.period is not None

    for i in range(len(pieces) - 1):
        level = walls[i].level
        left = pieces[i].dh.evaluate(level)
        right = pieces[i + 1].dh.evaluate(level)
        checks.append(
            make_check(
                f"continuity:wall{i}",
                f"reduced volume continuous at t = {rational_to_str(level)}",
                "the one-sided limits of the reduced-space volume agree at the wall",
                rational_to_str(left),
                rational_to_str(right),
            )
        )

    for i, wall in enumerate(walls):
        wrap = i == len(pieces) - 1
        if wrap:
            after = pieces[0].dh.translate(model.period)
        else:
            after = pieces[i + 1].dh
        jump = after - pieces[i].dh
        checks.append(
            make_check(
                f"delta:wall{i}",
                f"wall crossing at t = {rational_to_str(wall.level)} "
                f"({wall.count} points, weights {wall.weights})",
                "the polynomial jump equals count*(t-level)^2 / (product of weights)",
                wall_crossing_delta(wall),
                jump,
            )
        )

    for i, piece in enumerate(pieces):
        checks.append(
            make_check(
                f"positivity:piece{i}",
                f"volume positive on {piece.interval_str()}",
                "the reduced-space volume polynomial is positive on the open interval",
                "true",
                "true" if _positive_on_open(piece.dh, piece.lo, piece.hi) else "false",
            )
        )
        checks.append(
            make_check(
                f"even:piece{i}",
                f"even integer coefficients on {piece.interval_str()}",
                "a volume polynomial coming from an integral class pair has even coefficients",
                "true",
                "true" if piece.dh.is_even_integral() else "false",
            )
        )

    for i, piece in enumerate(pieces):
        if piece.class_pair is None:
            continue
        kappa, eta = piece.class_pair
        checks.append(
            make_check(
                f"pair:piece{i}",
                f"class pair reproduces the volume polynomial on {piece.interval_str()}",
                "((kappa,kappa), -2(kappa,eta), (eta,eta)) equals the stored coefficients",
                piece.dh,
                dh_from_pair(kappa, eta),
            )
        )
        if isinstance(kappa, LatticeVector):
            try:
                primitive = is_primitive_embedding([kappa, eta])
            except ValueError:
                primitive = False
            checks.append(
                make_check(
                    f"primitive:piece{i}",
                    f"class pair spans a saturated sublattice on {piece.interval_str()}",
                    "the pair extends to no proper finite-index overlattice of its span",
                    "true",
                    "true" if primitive else "false",
                )
            )

    if periodic:
        level = walls[-1].level
        closing = pieces[0].dh.translate(model.period).evaluate(level)
        checks.append(
            make_check(
                "period-closure",
                f"circle closes up: values agree at t = {rational_to_str(level)} "
                f"and t - {rational_to_str(model.period)}",
                "the volume is well defined on the circle of circumference one period",
                rational_to_str(pieces[-1].dh.evaluate(level)),
                rational_to_str(closing),
            )
        )

    if model.fixed_points is not None:
        checks.append(
            make_check(
                "fixed-point-total",
                "total fixed point count",
                "the wall counts add up to the declared number of fixed points",
                model.fixed_points,
                sum(w.count for w in walls),
            )
        )

    return Report(f"model {model.name}", tuple(checks))


def euler_class_match(piece_a: Piece, piece_b: Piece) -> bool:
    """Whether two pieces' circle bundles agree over a common reduced space.

    Requires lattice class pairs on both pieces.  Unequal Gram data is an
    immediate mismatch; otherwise the verified orientation-preserving
    isometry construction decides (and its errors propagate).
    """
    for piece in (piece_a, piece_b):
        if piece.class_pair is None or not isinstance(piece.class_pair[0], LatticeVector):
            raise ValueError("piece carries no lattice class pair")
    ka, ea = piece_a.class_pair
    kb, eb = piece_b.class_pair
    if (norm(ka), pairing(ka, ea), norm(ea)) != (norm(kb), pairing(kb, eb), norm(eb)):
        return False
    lemma_iso(ka, ea, kb, eb, preserve=True)
    return True


# -- JSON model files --------------------------------------------------------


def _endpoint_from_json(v):
    if v in ("inf", "-inf"):
        return None
    return rational_from_json(v)


def model_from_json_dict(data: dict) -> GluedModel:
    """Parse the model schema; every malformation raises ModelError."""
    if not isinstance(data, dict):
        raise ModelError("model file must contain a JSON object")
    try:
        pieces = []
        for raw in data["pieces"]:
            lo, hi = raw["interval"]
            coeffs = [rational_from_json(c) for c in raw["dh"]]
            if len(coeffs) != 3:
                raise ModelError("dh must have three coefficients")
            pair = None
            if "class_pair" in raw:
                pair = tuple(
                    _K3.vector(raw["class_pair"][key]) for key in ("kappa", "eta")
                )
            pieces.append(
                Piece(
                    _endpoint_from_json(lo),
                    _endpoint_from_json(hi),
                    DHPolynomial(*coeffs),
                    class_pair=pair,
                    reduced_space=raw.get("reduced_space", "K3"),
                )
            )
        walls = [
            Wall(rational_from_json(w["level"]), int(w["count"]), tuple(w["weights"]))
            for w in data["walls"]
        ]
        period = data.get("period")
        return GluedModel(
            tuple(pieces),
            tuple(walls),
            period=None if period is None else rational_from_json(period),
            fixed_points=data.get("fixed_points"),
            name=str(data.get("name", "model")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model: {exc}") from exc


def model_to_json_dict(model: GluedModel) -> dict:
    def endpoint(v, side):
        if v is None:
            return "-inf" if side == 0 else "inf"
        return rational_to_str(v)

    pieces = []
    for p in model.pieces:
        raw = {
            "interval": [endpoint(p.lo, 0), endpoint(p.hi, 1)],
            "dh": [rational_to_str(c) for c in p.dh.coefficients],
            "reduced_space": p.reduced_space,
        }
        if p.class_pair is not None:
            kappa, eta = p.class_pair
            if not isinstance(kappa, LatticeVector):
                raise ModelError("only lattice class pairs serialize")
            raw["class_pair"] = {
                "kappa": list(kappa.coords),
                "eta": list(eta.coords),
            }
        pieces.append(raw)
    out = {"name": model.name, "pieces": pieces}
    out["walls"] = [
        {
            "level": rational_to_str(w.level),
            "count": w.count,
            "weights": list(w.weights),
        }
        for w in model.walls
    ]
    if model.period is not None:
        out["period"] = rational_to_str(model.period)
    if model.fixed_points is not None:
        out["fixed_points"] = model.fixed_points
    return out


def packaged_model(name: str = "theorem1") -> GluedModel:
    """Load one of the model fixtures shipped inside the package."""
    text = resources.files("k3dh").joinpath(f"data/{name}.json").read_text()
    return model_from_json_dict(json.loads(text))
