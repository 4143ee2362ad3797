import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3dh.exact_linalg import IntMatrix
from k3dh.lattice import make_K3, k3_e, k3_f, norm, pairing
from k3dh.isometry import (
    Isometry,
    eichler_transvection,
    flip_third_H,
    identity_isometry,
    lemma_iso,
    map_pair_to_standard,
    preserves_components,
    verify,
)

K3 = make_K3()
E = [k3_e(K3, i) for i in range(3)]
F = [k3_f(K3, i) for i in range(3)]

_PARTNER = {0: 1, 1: 0, 2: 3, 3: 2, 4: 5, 5: 4}


def minus_identity():
    n = K3.rank
    return Isometry(K3, IntMatrix([[-1 if i == j else 0 for j in range(n)] for i in range(n)]))


def random_transvection(rng, amp=2):
    """Transvection with a random hyperbolic base and orthogonal argument."""
    base_i = rng.choice(range(6))
    coords = [0] * K3.rank
    for i in range(K3.rank):
        if i == _PARTNER[base_i]:
            continue
        coords[i] = rng.randint(-amp, amp)
    return eichler_transvection(K3.basis_vector(base_i), K3.vector(coords))


def transvected_pair(rng, kap, eta, moves, amp=2):
    for _ in range(moves):
        t = random_transvection(rng, amp)
        kap, eta = t.apply(kap), t.apply(eta)
    return kap, eta


def standard_pair(l0, m, l2):
    return E[0] + l0 * F[0], m * F[0] + E[1] + l2 * F[1]


def test_isometry_construction_is_checked():
    ident = identity_isometry(K3)
    assert ident.det == 1
    assert verify(ident.matrix, K3).matrix == ident.matrix
    with pytest.raises(ValueError):
        Isometry(K3, IntMatrix([[1, 0], [0, 1]]))
    # e1 -> f1, f1 -> -e1 flips the sign of the pairing on the first block
    n = K3.rank
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    rows[0][0], rows[0][1], rows[1][0], rows[1][1] = 0, -1, 1, 0
    with pytest.raises(ValueError):
        Isometry(K3, IntMatrix(rows))


def test_apply_compose_inverse():
    rng = random.Random(3)
    g = random_transvection(rng)
    h = random_transvection(rng)
    v = K3.vector([rng.randint(-3, 3) for _ in range(K3.rank)])
    assert g.compose(h).apply(v) == g.apply(h.apply(v))
    assert g.inverse().compose(g).matrix == IntMatrix.identity(K3.rank)
    assert norm(g.apply(v)) == norm(v)


def test_transvection_examples():
    t = eichler_transvection(E[0], E[1])
    assert t.apply(F[0]) == F[0] + E[1]
    assert t.apply(F[1]) == F[1] - E[0]
    assert t.apply(E[0]) == E[0]
    assert t.apply(E[1]) == E[1]
    assert t.det == 1
    zero = K3.vector([0] * K3.rank)
    assert eichler_transvection(E[0], zero).matrix == IntMatrix.identity(K3.rank)
    with pytest.raises(ValueError):
        eichler_transvection(E[0] + F[0], E[1])  # base not isotropic
    with pytest.raises(ValueError):
        eichler_transvection(E[0], F[0])  # argument not orthogonal


def test_transvection_additive_in_argument():
    rng = random.Random(11)
    for _ in range(20):
        base_i = rng.choice(range(6))
        e = K3.basis_vector(base_i)

        def arg():
            coords = [0] * K3.rank
            for i in range(K3.rank):
                if i == _PARTNER[base_i]:
                    continue
                coords[i] = rng.randint(-2, 2)
            return K3.vector(coords)

        a, b = arg(), arg()
        lhs = eichler_transvection(e, a).compose(eichler_transvection(e, b))
        assert lhs.matrix == eichler_transvection(e, a + b).matrix


def test_preserves_components_calibration():
    assert preserves_components(identity_isometry(K3))
    assert not preserves_components(flip_third_H(K3))
    assert not preserves_components(minus_identity())
    rng = random.Random(5)
    for _ in range(5):
        assert preserves_components(random_transvection(rng))


def test_preserves_components_is_multiplicative():
    rng = random.Random(17)
    samples = [
        identity_isometry(K3),
        flip_third_H(K3),
        minus_identity(),
        random_transvection(rng),
        flip_third_H(K3).compose(random_transvection(rng)),
    ]
    for g in samples:
        for h in samples:
            assert preserves_components(g.compose(h)) == (
                preserves_components(g) == preserves_components(h)
            )


def test_map_pair_fixes_reference_pairs():
    for l0, m, l2 in ((3, 2, -2), (0, 1, 0), (-2, -8, -2)):
        kap, eta = standard_pair(l0, m, l2)
        g = map_pair_to_standard(kap, eta)
        assert g.apply(kap) == kap
        assert g.apply(eta) == eta


def test_map_pair_round_trip_randomized():
    rng = random.Random(20260814)
    for _ in range(15):
        kap0, eta0 = standard_pair(
            rng.randint(-6, 6), rng.randint(-6, 6), rng.randint(-6, 6)
        )
        kap, eta = transvected_pair(rng, kap0, eta0, rng.randint(1, 5))
        g = map_pair_to_standard(kap, eta)
        assert g.apply(kap) == kap0
        assert g.apply(eta) == eta0


def test_map_pair_rejects_non_primitive():
    with pytest.raises(ValueError):
        map_pair_to_standard(E[0] + F[0], 2 * E[1])
    with pytest.raises(ValueError):
        map_pair_to_standard(E[0], E[0])  # dependent


def test_lemma_iso_reference_case_both_modes():
    kap = E[0] - 2 * F[0]
    eta = -8 * F[0] + E[1] - 2 * F[1]
    assert (norm(kap), norm(eta), pairing(kap, eta)) == (-4, -4, -8)
    rng = random.Random(29)
    kp, ep = transvected_pair(rng, kap, eta, 3)
    for preserve in (True, False):
        phi = lemma_iso(kap, eta, kp, ep, preserve=preserve)
        assert phi.apply(kp) == kap
        assert phi.apply(ep) == eta
        assert preserves_components(phi) == preserve


def test_lemma_iso_rejects_mismatched_gram_data():
    kap, eta = standard_pair(1, 2, 3)
    kap2, eta2 = standard_pair(1, 2, 4)
    with pytest.raises(ValueError):
        lemma_iso(kap, eta, kap2, eta2)


@settings(max_examples=15, deadline=None)
@given(
    l0=st.integers(-5, 5),
    m=st.integers(-5, 5),
    l2=st.integers(-5, 5),
    seed=st.integers(0, 10**6),
)
def test_map_pair_round_trip_property(l0, m, l2, seed):
    rng = random.Random(seed)
    kap0, eta0 = standard_pair(l0, m, l2)
    kap, eta = transvected_pair(rng, kap0, eta0, rng.randint(1, 3))
    g = map_pair_to_standard(kap, eta)
    assert g.apply(kap) == kap0
    assert g.apply(eta) == eta0
