"""Command line front end.

Subcommands wrap the library modules one-to-one, plus `verify`, which runs
the consolidated battery of every reference value the package reproduces.
Exit codes are uniform: 0 all checks pass, 1 a mathematical check failed,
2 malformed input.  All numbers are printed exactly (integers or p/q);
there is no floating point anywhere.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .isometry import (
    Isometry,
    StandardizationError,
    eichler_transvection,
    flip_third_H,
    identity_isometry,
    lemma_iso,
    preserves_components,
)
from .kummer import (
    NUM_EXCEPTIONAL,
    area_sum_form,
    eta_hat,
    exceptional,
    form_to_torus_class,
    kappa_hat,
    pairing as blowup_pairing,
    primitive_pair_check,
    pullback,
    sigma_class,
    symplectic_family_form,
    volume_real_form,
    wedge_integrate,
)
from .lattice import (
    Lattice,
    direct_sum,
    k3_e,
    k3_f,
    lattice_from_json_dict,
    make_E8,
    make_H,
    make_K3,
    norm,
    pairing,
)
from .moment import (
    Check,
    DHPolynomial,
    GluedModel,
    ModelError,
    Piece,
    Report,
    Wall,
    dh_from_pair,
    make_check,
    model_from_json_dict,
    packaged_model,
    pair_from_polynomial,
    rational_from_json,
    rational_to_str,
    validate,
)
from .period import PeriodPoint, is_in_k_omega, is_in_ktilde_omega, project_to_alpha_perp
from .shortvec import DefiniteGram, IndefiniteGramError, enumerate_norm, roots_orthogonal_to

_STANDARD = {
    "h": make_H,
    "e8": make_E8,
    "e8+e8": lambda: direct_sum("E8+E8", make_E8(), make_E8()),
    "k3": make_K3,
}


class InputError(Exception):
    """Bad file, bad JSON, bad record shape: exit code 2."""


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _parse_lattice(data) -> Lattice:
    try:
        return lattice_from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad lattice data: {exc}") from exc


def _resolve_lattice(args) -> Lattice:
    if getattr(args, "standard", None):
        return _STANDARD[args.standard]()
    return _parse_lattice(_load_json(args.file))


def _emit(args, report: Report) -> int:
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        for line in report.lines():
            print(line)
    return 0 if report.all_passed() else 1


def _pairing_preserved(phi: Isometry) -> bool:
    # recheck M^T G M = G from scratch rather than trusting the constructor
    g = phi.lattice.gram
    return phi.matrix.transpose().mul(g).mul(phi.matrix) == g


def _rats(*values) -> str:
    return "(" + ", ".join(rational_to_str(v) for v in values) + ")"


def _distinct(values) -> str:
    return ", ".join(sorted({rational_to_str(v) for v in values}))


# -- plain subcommands -------------------------------------------------------


def cmd_lattice_info(args) -> int:
    lattice = _resolve_lattice(args)
    sig = lattice.signature()
    info = {
        "name": lattice.name,
        "rank": lattice.rank,
        "even": lattice.is_even(),
        "unimodular": lattice.is_unimodular(),
        "signature": list(sig),
    }
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        print(f"name: {lattice.name}")
        print(f"rank: {lattice.rank}")
        print(f"even: {str(lattice.is_even()).lower()}")
        print(f"unimodular: {str(lattice.is_unimodular()).lower()}")
        print(f"signature: ({sig[0]}, {sig[1]})")
    return 0


def cmd_shortvec(args) -> int:
    lattice = _resolve_lattice(args)
    try:
        gram = DefiniteGram(lattice.gram)
        vectors = enumerate_norm(gram, args.norm)
    except (IndefiniteGramError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    if args.json:
        doc = {"norm": args.norm, "count": len(vectors), "vectors": [list(v) for v in vectors]}
        print(json.dumps(doc, indent=2))
    else:
        for v in vectors:
            print(" ".join(str(x) for x in v))
        print(f"count: {len(vectors)}")
    return 0


def _rational_vector(lattice: Lattice, raw, what: str):
    if not isinstance(raw, list) or len(raw) != lattice.rank:
        raise InputError(f"'{what}' must be a list of {lattice.rank} entries")
    try:
        return lattice.rational_vector([rational_from_json(v) for v in raw])
    except ModelError as exc:
        raise InputError(f"bad '{what}': {exc}") from exc


def cmd_period_check(args) -> int:
    data = _load_json(args.file)
    if not isinstance(data, dict):
        raise InputError("period record must be a JSON object")
    lattice = _parse_lattice(data["lattice"]) if "lattice" in data else make_K3()
    for key in ("kappa", "re", "im"):
        if key not in data:
            raise InputError(f"period record is missing '{key}'")
    kappa = _rational_vector(lattice, data["kappa"], "kappa")
    re = _rational_vector(lattice, data["re"], "re")
    im = _rational_vector(lattice, data["im"], "im")

    checks = []
    try:
        point = PeriodPoint(re, im)
    except ValueError:
        point = None
    checks.append(
        make_check(
            "period:point",
            "re + i*im spans a period point",
            "(re,im) = 0 and (re,re) = (im,im) > 0",
            "true",
            "true" if point is not None else "false",
        )
    )
    if point is not None:
        khat = project_to_alpha_perp(kappa, point)
        rhs = norm(kappa) - 2 * point.pairing_square(kappa) / point.hermitian_norm()
        checks.append(
            make_check(
                "period:projection-identity",
                "projected norm identity",
                "(proj k, proj k) = (k,k) - 2((k,re)^2 + (k,im)^2)/(re,re)",
                rational_to_str(norm(khat)),
                rational_to_str(rhs),
            )
        )
        checks.append(
            make_check(
                "period:cone-equivalence",
                "tame membership matches projecting then testing the positive cone",
                "the two membership tests agree on this record",
                "true" if is_in_ktilde_omega(kappa, point) else "false",
                "true" if is_in_k_omega(khat, point) else "false",
            )
        )
    report = Report("period record", tuple(checks))
    code = _emit(args, report)
    if point is not None and not args.json:
        print(f"in tame cone: {str(is_in_ktilde_omega(kappa, point)).lower()}")
    return code


def cmd_isometry(args) -> int:
    data = _load_json(args.pairs)
    if not isinstance(data, dict):
        raise InputError("pairs file must be a JSON object")
    lattice = make_K3()
    vecs = {}
    for key in ("kappa", "eta", "kappa_p", "eta_p"):
        raw = data.get(key)
        if not isinstance(raw, list) or len(raw) != lattice.rank:
            raise InputError(f"'{key}' must be a list of {lattice.rank} integers")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
            raise InputError(f"'{key}' must contain integers only")
        vecs[key] = lattice.vector(raw)
    preserve = not args.reverse
    kappa, eta = vecs["kappa"], vecs["eta"]
    kappa_p, eta_p = vecs["kappa_p"], vecs["eta_p"]

    gram = ((norm(kappa), pairing(kappa, eta)), (pairing(kappa, eta), norm(eta)))
    gram_p = ((norm(kappa_p), pairing(kappa_p, eta_p)), (pairing(kappa_p, eta_p), norm(eta_p)))
    checks = [
        make_check(
            "isometry:gram-data",
            "both pairs share the same Gram data",
            "norms and mutual pairing agree, the precondition for mapping one onto the other",
            str(gram),
            str(gram_p),
        )
    ]
    phi = None
    if gram == gram_p:
        try:
            phi = lemma_iso(kappa, eta, kappa_p, eta_p, preserve=preserve)
        except (StandardizationError, ValueError) as exc:
            checks.append(
                make_check(
                    "isometry:construction",
                    "an isometry carrying one pair to the other exists",
                    "the move search succeeds on primitive input",
                    "constructed",
                    f"failed: {exc}",
                )
            )
        if phi is not None:
            checks.append(
                make_check(
                    "isometry:images",
                    "matrix maps the primed pair to the unprimed pair",
                    "phi(kappa') = kappa and phi(eta') = eta, checked by application",
                    "true",
                    "true" if (phi.apply(kappa_p) == kappa and phi.apply(eta_p) == eta) else "false",
                )
            )
            checks.append(
                make_check(
                    "isometry:pairing-preserved",
                    "matrix preserves the lattice pairing",
                    "M^T G M = G on the full rank-22 Gram matrix",
                    "true",
                    "true" if _pairing_preserved(phi) else "false",
                )
            )
            checks.append(
                make_check(
                    "isometry:orientation",
                    "orientation mode honored",
                    "positive 3-plane components preserved exactly when requested",
                    "preserved" if preserve else "reversed",
                    "preserved" if preserves_components(phi) else "reversed",
                )
            )
    report = Report("isometry construction", tuple(checks))
    if args.json:
        doc = report.to_json_dict()
        if phi is not None:
            doc["matrix"] = [list(row) for row in phi.matrix.rows]
        print(json.dumps(doc, indent=2))
    else:
        for line in report.lines():
            print(line)
        if phi is not None:
            print("matrix:")
            for row in phi.matrix.rows:
                print("  " + " ".join(f"{x:3d}" for x in row))
    return 0 if report.all_passed() else 1


# -- the verification battery ------------------------------------------------


def _branch_polynomial(sign: int) -> DHPolynomial:
    """Half the torus self-integral of the symplectic family, exactly.

    Quadratic in t, so three sample values pin the coefficients; sampling
    keeps this route independent of the pairing-based computation.
    """
    values = {}
    for t in (0, 1, -1):
        omega = symplectic_family_form(sign, t)
        values[t] = wedge_integrate(omega, omega) / 2
    c0 = values[0]
    c2 = (values[1] + values[-1]) / 2 - c0
    c1 = (values[1] - values[-1]) / 2
    return DHPolynomial(c0, c1, c2)


def _kummer_checks() -> list[Check]:
    checks = []
    vol, area = volume_real_form(), area_sum_form()
    checks.append(
        make_check(
            "torus:integrals",
            "reference wedge integrals on the torus",
            "self-integrals 8 and 8, cross integral 0",
            "(8, 8, 0)",
            _rats(
                wedge_integrate(vol, vol),
                wedge_integrate(area, area),
                wedge_integrate(vol, area),
            ),
        )
    )
    khat, ep, em = kappa_hat(), eta_hat(1), eta_hat(-1)
    checks.append(
        make_check(
            "blowup:pairing-table",
            "blowup intersection numbers",
            "((k,k), (e+,e+), (e-,e-), (e+,k), (e-,k))",
            "(-4, -4, -4, -8, 8)",
            _rats(
                blowup_pairing(khat, khat),
                blowup_pairing(ep, ep),
                blowup_pairing(em, em),
                blowup_pairing(ep, khat),
                blowup_pairing(em, khat),
            ),
        )
    )
    plus_spheres = [blowup_pairing(exceptional(i), ep) for i in range(NUM_EXCEPTIONAL)]
    pull_spheres = [
        blowup_pairing(pullback(khat.torus_part), exceptional(i))
        for i in range(NUM_EXCEPTIONAL)
    ]
    checks.append(
        make_check(
            "blowup:sphere-pairings",
            "exceptional sphere pairings",
            "(e+, E_i) = -1 for every i; classes pulled back from the torus miss the spheres",
            "-1 and 0",
            f"{_distinct(plus_spheres)} and {_distinct(pull_spheres)}",
        )
    )
    checks.append(
        make_check(
            "dh:plus-branch",
            "plus-branch squared-volume polynomial",
            "((k,k), -2(k,e+), (e+,e+)) as coefficients in t",
            DHPolynomial(-4, 16, -4),
            dh_from_pair(khat, ep),
        )
    )
    checks.append(
        make_check(
            "dh:minus-branch",
            "minus-branch squared-volume polynomial",
            "((k,k), -2(k,e-), (e-,e-)) as coefficients in t",
            DHPolynomial(-4, -16, -4),
            dh_from_pair(khat, em),
        )
    )
    checks.append(
        make_check(
            "dh:orbifold-branch",
            "half the torus self-integral of the symplectic family",
            "both signs integrate to the same even polynomial 4 + 4t^2",
            "((4, 0, 4), (4, 0, 4))",
            f"({_branch_polynomial(1)}, {_branch_polynomial(-1)})",
        )
    )
    half_sum = (vol + area).scale(Fraction(1, 2))
    checks.append(
        make_check(
            "primitive:half-sum",
            "the half-sum class is integral primitive with a unit sphere pairing",
            "coordinate gcd 1 and some (E_i, x) = +-1",
            "true",
            "true" if primitive_pair_check(form_to_torus_class(half_sum), ep) else "false",
        )
    )
    wall_class = sigma_class(1, 1)
    checks.append(
        make_check(
            "primitive:wall-class",
            "the glued family class at t = 1",
            "no exceptional part left; self-pairing 8",
            "exc 0, self 8",
            "exc {}, self {}".format(
                max(abs(c) for c in wall_class.exc),
                rational_to_str(blowup_pairing(wall_class, wall_class)),
            ),
        )
    )
    return checks


def _perturbed(model: GluedModel, what: str) -> GluedModel:
    """Corrupt exactly one fixture value; the report must notice."""
    pieces, walls = list(model.pieces), list(model.walls)
    if what == "dh":
        p = pieces[0]
        broken = DHPolynomial(p.dh.c0 + 2, p.dh.c1, p.dh.c2)
        pieces[0] = Piece(p.lo, p.hi, broken, p.class_pair, p.reduced_space)
    elif what == "wall":
        w = walls[0]
        walls[0] = Wall(w.level, w.count - 1, w.weights)
    elif what == "weight":
        w = walls[0]
        walls[0] = Wall(w.level, w.count, (w.weights[0] + 1 or 1,) + w.weights[1:])
    else:
        raise InputError(f"unknown perturbation: {what}")
    return GluedModel(tuple(pieces), tuple(walls), model.period, model.fixed_points, model.name)


def run_verify_paper(perturb: str | None = None, samples: int = 50, seed: int = 52706) -> Report:
    """The consolidated battery of every reference value in the package.

    `perturb` intentionally corrupts one glued-model fixture value (a
    coefficient, a wall count, or a weight) before validation, so the
    failure path is itself exercised end to end.
    """
    checks = []
    K3 = make_K3()

    checks.append(
        make_check(
            "lattice:shape",
            "standard rank-22 lattice invariants",
            "even, unimodular, signature (3, 19)",
            "rank 22, even, unimodular, signature (3, 19)",
            "rank {}, {}, {}, signature {}".format(
                K3.rank,
                "even" if K3.is_even() else "odd",
                "unimodular" if K3.is_unimodular() else "not unimodular",
                K3.signature(),
            ),
        )
    )

    e8 = make_E8()
    checks.append(
        make_check(
            "roots:e8",
            "E8 norm-2 vector count",
            "240 roots",
            240,
            len(enumerate_norm(DefiniteGram(e8.gram), 2)),
        )
    )
    checks.append(
        make_check(
            "roots:e8+e8",
            "E8+E8 norm-2 vector count",
            "an orthogonal sum doubles the count",
            480,
            len(enumerate_norm(DefiniteGram(direct_sum("E8+E8", e8, e8).gram), 2)),
        )
    )
    plane = [k3_e(K3, i) + k3_f(K3, i) for i in range(3)]
    checks.append(
        make_check(
            "roots:orthogonal-to-3plane",
            "roots orthogonal to the standard positive 3-plane",
            "480 block roots plus the six vectors +-(e_i - f_i)",
            486,
            len(roots_orthogonal_to(K3, plane)),
        )
    )

    rng = random.Random(seed)
    good = 0
    for _ in range(samples):
        a, b = rng.randint(1, 5), rng.randint(0, 5)
        u = a * (k3_e(K3, 0) + k3_f(K3, 0)) + b * (k3_e(K3, 1) + k3_f(K3, 1))
        v = a * (k3_e(K3, 1) + k3_f(K3, 1)) - b * (k3_e(K3, 0) + k3_f(K3, 0))
        point = PeriodPoint(u.to_rational(), v.to_rational())
        kappa = K3.rational_vector(
            [Fraction(rng.randint(-8, 8), rng.choice((1, 2, 3))) for _ in range(K3.rank)]
        )
        khat = project_to_alpha_perp(kappa, point)
        identity_holds = (
            norm(khat)
            == norm(kappa) - 2 * point.pairing_square(kappa) / point.hermitian_norm()
        )
        cones_agree = is_in_ktilde_omega(kappa, point) == is_in_k_omega(khat, point)
        good += 1 if identity_holds and cones_agree else 0
    checks.append(
        make_check(
            "period:identity-sample",
            f"projected-norm identity and cone equivalence on {samples} random samples",
            "(proj k, proj k) = (k,k) - 2((k,re)^2+(k,im)^2)/(re,re); memberships agree",
            f"{samples}/{samples}",
            f"{good}/{samples}",
        )
    )

    kappa0, eta0 = pair_from_polynomial(DHPolynomial(-4, 16, -4))
    move = eichler_transvection(k3_e(K3, 2), k3_f(K3, 0) - 2 * k3_e(K3, 1) + k3_f(K3, 1))
    move = move.compose(eichler_transvection(k3_f(K3, 2), 3 * k3_e(K3, 0) - k3_e(K3, 1)))
    kappa_p, eta_p = move.apply(kappa0), move.apply(eta0)
    for mode, preserve in (("preserve", True), ("reverse", False)):
        phi = lemma_iso(kappa0, eta0, kappa_p, eta_p, preserve=preserve)
        ok = (
            phi.apply(kappa_p) == kappa0
            and phi.apply(eta_p) == eta0
            and _pairing_preserved(phi)
            and preserves_components(phi) == preserve
        )
        checks.append(
            make_check(
                f"isometry:lemma-{mode}",
                f"verified isometry onto a transvected copy of the model pair ({mode} mode)",
                "images, pairing preservation, and orientation all re-verified",
                "true",
                "true" if ok else "false",
            )
        )
    checks.append(
        make_check(
            "isometry:orientation-calibration",
            "component calibration of reference isometries",
            "identity preserves plane components; negating one hyperbolic summand does not",
            "(True, False)",
            str(
                (
                    preserves_components(identity_isometry(K3)),
                    preserves_components(flip_third_H(K3)),
                )
            ),
        )
    )

    checks.extend(_kummer_checks())

    rng = random.Random(seed + 1)
    trips = 0
    for _ in range(20):
        p = DHPolynomial(*(Fraction(2 * rng.randint(-9, 9)) for _ in range(3)))
        ka, et = pair_from_polynomial(p)
        trips += 1 if dh_from_pair(ka, et) == p else 0
    checks.append(
        make_check(
            "dh:round-trip",
            "polynomial -> lattice pair -> polynomial on 20 random even polynomials",
            "dh_from_pair inverts pair_from_polynomial",
            "20/20",
            f"{trips}/20",
        )
    )

    model = packaged_model()
    if perturb is not None:
        model = _perturbed(model, perturb)
    for c in validate(model).checks:
        checks.append(
            Check("model:" + c.check_id, c.description, c.claim, c.expected, c.computed, c.passed)
        )

    return Report("verification battery", tuple(checks))


def cmd_kummer_report(args) -> int:
    return _emit(args, Report("blowup intersection numbers", tuple(_kummer_checks())))


def cmd_validate_model(args) -> int:
    data = _load_json(args.file)
    try:
        model = model_from_json_dict(data)
    except ModelError as exc:
        raise InputError(str(exc)) from exc
    return _emit(args, validate(model))


def cmd_verify(args) -> int:
    return _emit(args, run_verify_paper(perturb=args.perturb))


# -- parser ------------------------------------------------------------------


def _add_lattice_source(sub, file_flag: str):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--standard", choices=sorted(_STANDARD))
    group.add_argument(file_flag, dest="file", metavar="JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="k3dh",
        description="Exact lattice, period, and reduced-space verification toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice-info", help="rank, parity, unimodularity, signature")
    _add_lattice_source(p, "--file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lattice_info)

    p = sub.add_parser("shortvec", help="enumerate all vectors of a given norm")
    _add_lattice_source(p, "--gram")
    p.add_argument("--norm", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_shortvec)

    p = sub.add_parser("period-check", help="check a period record {kappa, re, im}")
    p.add_argument("file", metavar="JSON")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_period_check)

    p = sub.add_parser("isometry", help="construct a verified isometry between pairs")
    p.add_argument("--pairs", required=True, metavar="JSON")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--preserve", action="store_true")
    mode.add_argument("--reverse", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_isometry)

    p = sub.add_parser("kummer-report", help="blowup intersection numbers, pass/fail")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_kummer_report)

    p = sub.add_parser("validate-model", help="validate a glued model file")
    p.add_argument("file", metavar="JSON")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate_model)

    p = sub.add_parser("verify", help="run the full verification battery")
    p.add_argument(
        "--perturb",
        choices=("dh", "wall", "weight"),
        help="corrupt one fixture value to exercise the failure path",
    )
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
