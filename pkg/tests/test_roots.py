"""Root datum tables and finite Weyl group arithmetic."""

import random

import pytest

from adlv.errors import ConfigError
from adlv.roots import (
    build_root_datum,
    dominant_rep,
    min_coset_reps,
    weyl_act,
    weyl_group,
    zero_pairing_set,
)

# (label, #positive roots, |P/Q|)
TYPE_TABLE = [
    ("A1", 1, 2),
    ("A2", 3, 3),
    ("A3", 6, 4),
    ("B2", 4, 2),
    ("B3", 9, 2),
    ("C2", 4, 2),
    ("C3", 9, 2),
    ("D4", 12, 4),
    ("G2", 6, 1),
    ("F4", 24, 1),
    ("E6", 36, 3),
    ("A2xA2", 6, 9),
    ("A1xC2", 5, 4),
]


@pytest.mark.parametrize("label,npos,fg", TYPE_TABLE)
def test_type_tables(label, npos, fg):
    datum = build_root_datum(label)
    assert len(datum.positive_roots) == npos
    assert datum.fundamental_group.group_order() == fg
    for i in range(datum.rank):
        assert datum.cartan[i][i] == 2
        # adjoint convention: fundamental coweights pair to delta_ij
        omega = tuple(1 if k == i else 0 for k in range(datum.rank))
        for j in range(datum.rank):
            assert datum.pairing(omega, datum.simple_root(j + 1)) == (i == j)
    # positive roots are nonnegative integer combinations of simple roots
    for a in datum.positive_roots:
        assert all(c >= 0 for c in a) and sum(a) >= 1
    # 2 rho pairs to 2 with every simple coroot
    for i in range(datum.rank):
        assert datum.pairing_2rho(datum.simple_coroots[i]) == 2
    assert datum.rho2 == tuple(
        sum(a[i] for a in datum.positive_roots) for i in range(datum.rank)
    )


@pytest.mark.parametrize("bad", ["Z9", "A0", "D2", "E5", "H3", "", "A2x"])
def test_unknown_labels_rejected(bad):
    with pytest.raises(ConfigError):
        build_root_datum(bad)


def test_labels_case_insensitive():
    assert build_root_datum("a2xc2") is build_root_datum("A2xC2")


# Poincare polynomial oracle: |{w : l(w) = k}| equals the coefficient of q^k
# in prod_i (1 + q + ... + q^{d_i - 1}) for the degrees of the type.
DEGREES = {"A1": (2,), "A2": (2, 3), "C2": (2, 4), "G2": (2, 6), "A3": (2, 3, 4)}


@pytest.mark.parametrize("label,degrees", sorted(DEGREES.items()))
def test_length_generating_function(label, degrees):
    datum = build_root_datum(label)
    poly = [1]
    for d in degrees:
        nxt = [0] * (len(poly) + d - 1)
        for i, c in enumerate(poly):
            for j in range(d):
                nxt[i + j] += c
        poly = nxt
    counts = {}
    for w in weyl_group(datum):
        counts[w.length] = counts.get(w.length, 0) + 1
    assert counts == {k: c for k, c in enumerate(poly) if c}


def test_weyl_act_fixtures():
    a1 = build_root_datum("A1")
    assert weyl_act(a1.identity_weyl, (5,)) == (5,)
    assert weyl_act(a1.simple_weyl(1), (2,)) == (-2,)  # alpha^vee -> -alpha^vee
    a2 = build_root_datum("A2")
    assert weyl_act(a2.w0(), (1, 0)) == (0, -1)  # w0(omega1) = -omega2


def test_weyl_act_inverse_property():
    rng = random.Random(0)
    for label in ("A2", "C2", "G2"):
        datum = build_root_datum(label)
        group = weyl_group(datum)
        for _ in range(50):
            w = rng.choice(group)
            v = tuple(rng.randrange(-4, 5) for _ in range(datum.rank))
            assert weyl_act(w.inverse(), weyl_act(w, v)) == v


def _orbit_scan(datum, v):
    """Independent oracle: scan the whole W-orbit for the dominant member."""
    best = None
    for w in weyl_group(datum):
        u = w.coweight_action(v)
        if all(c >= 0 for c in u):
            if best is None:
                best = u
            else:
                assert best == u  # the dominant member is unique
    return best


def test_dominant_rep_fixtures():
    a1 = build_root_datum("A1")
    vbar, w = dominant_rep(a1, (-2,))
    assert vbar == (2,) and w is a1.simple_weyl(1)
    vbar, w = dominant_rep(a1, (3,))
    assert vbar == (3,) and w.is_identity
    a2 = build_root_datum("A2")
    vbar, w = dominant_rep(a2, (-1, 2))
    assert vbar == (1, 1) and w.reduced_word == (1,)


def test_dominant_rep_against_orbit_scan():
    rng = random.Random(1)
    for label in ("A2", "C2"):
        datum = build_root_datum(label)
        group = weyl_group(datum)
        for _ in range(60):
            v = tuple(rng.randrange(-4, 5) for _ in range(datum.rank))
            vbar, w = dominant_rep(datum, v)
            assert vbar == _orbit_scan(datum, v)
            assert w.coweight_action(v) == vbar
            minimal = min(
                u.length for u in group if u.coweight_action(v) == vbar
            )
            assert w.length == minimal
            # orbit invariance
            u = rng.choice(group)
            assert dominant_rep(datum, u.coweight_action(v))[0] == vbar


def test_zero_pairing_set():
    a2 = build_root_datum("A2")
    assert zero_pairing_set(a2, (0, 0)) == (1, 2)
    assert zero_pairing_set(a2, (1, 1)) == ()
    assert zero_pairing_set(a2, (1, 0)) == (2,)
    with pytest.raises(ValueError):
        zero_pairing_set(a2, (-1, 0))


def test_min_coset_reps():
    a2 = build_root_datum("A2")
    # right cosets of W_{1}: representatives of lengths 0, 1, 2
    reps = list(min_coset_reps(a2, [1], side="right"))
    assert sorted(w.length for w in reps) == [0, 1, 2]
    # oracle: each is the shortest inside its coset w W_J
    wj = [a2.identity_weyl, a2.simple_weyl(1)]
    seen = set()
    for w in reps:
        coset = frozenset(w * u for u in wj)
        assert coset not in seen
        seen.add(coset)
        assert w.length == min(u.length for u in coset)
    assert len(seen) == 3

    left = list(min_coset_reps(a2, [1], side="left"))
    for w in left:
        coset = frozenset(u * w for u in wj)
        assert w.length == min(u.length for u in coset)

    assert [w.length for w in min_coset_reps(a2, [1, 2])] == [0]  # J = S
    assert len(list(min_coset_reps(a2, []))) == 6  # J = empty: all of W

    with pytest.raises(ValueError):
        list(min_coset_reps(a2, [0]))


def test_longest_element():
    for label, length in (("A1", 1), ("A2", 3), ("C2", 4), ("G2", 6)):
        datum = build_root_datum(label)
        w0 = datum.w0()
        assert w0.length == length == len(datum.positive_roots)
        assert (w0 * w0).is_identity
        assert w0.coweight_action((1,) * datum.rank) == (-1,) * datum.rank
