"""Acceptance suite: one test per package-level exit criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see them
all); tolerances are exact equality of integers and rationals throughout.
"""

import random
import time
from fractions import Fraction

from adlv.roots import build_root_datum
from adlv.elements import (
    element_literal,
    elements_of_length,
    from_weyl,
    is_lowest_cell,
    omega_group,
    parse_element,
    supp_delta,
    translation,
)
from adlv.conjugacy import (
    class_info,
    class_key,
    enumerate_straight_classes,
    invariant_f,
    is_minimal_in_class,
    kottwitz_class,
    min2_decompose,
    reduce_to_minimal,
    same_conjugacy_class,
)
from adlv.elements import demazure_product, eta_delta
from adlv.hecke import ClassPolyEngine, XiPoly, hecke_mul, t_basis, verify_path_independence
from adlv.dimension import (
    EMPTY,
    BElement,
    defect_basic,
    dim_adlv,
    dim_grassmannian,
    mazur_check,
    point_count_superbasic_a,
    virtual_dimension,
)

from test_elements import hyperplane_length, random_element

_ENGINES = {}


def engine(label):
    if label not in _ENGINES:
        _ENGINES[label] = ClassPolyEngine(build_root_datum(label))
    return _ENGINES[label]


def report(number, description, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number} {description}: {status}{suffix}")


def basic_classes(datum):
    out = {}
    for tau in omega_group(datum):
        b = BElement.from_element(tau, label=element_literal(tau))
        out.setdefault(b.descriptor, b)
    return list(out.values())


def dominant_box(datum, bound):
    out = [()]
    for i in range(datum.rank):
        nxt = []
        for prefix in out:
            c = 0
            while True:
                mu = prefix + (c,) + (0,) * (datum.rank - i - 1)
                if sum(a * b for a, b in zip(datum.rho2, mu)) > bound:
                    break
                nxt.append(prefix + (c,))
                c += 1
        out = nxt
    return out


# --- criterion 1: rank-1 golden values ------------------------------------------


def test_acceptance_1_rank1_golden():
    start = time.monotonic()
    a1 = build_root_datum("A1")
    eng = engine("A1")
    w = parse_element(a1, "w[0 1 0]")  # t^{2 alpha^vee} s
    table = eng.table(w)
    ok = table == {"t[-2]": XiPoly.XI, "t[0]*s1": XiPoly.ONE}
    unit = BElement.unit(a1)
    ok &= dim_adlv(w, unit, engine=eng).dim == 2
    b_t = BElement.from_element(translation(a1, (2,)))
    ok &= dim_adlv(w, b_t, engine=eng).dim == 1
    grass = dim_grassmannian((2,), unit, engine=eng)
    closed = Fraction(sum(a * b for a, b in zip(a1.rho2, (2,))), 2) - Fraction(
        defect_basic(unit), 2
    )
    ok &= grass.dim == 1 == closed
    elapsed = time.monotonic() - start
    ok &= elapsed < 1.0
    report(1, "rank-1 golden values", ok, f"{elapsed:.3f}s")
    assert ok


# --- criterion 2: equality of dimension and virtual dimension --------------------


def test_acceptance_2_ghkr_equality():
    start = time.monotonic()
    failures = []
    checked = 0
    for label in ("A2", "C2"):
        datum = build_root_datum(label)
        eng = engine(label)
        full = frozenset(range(1, datum.rank + 1))
        bs = basic_classes(datum)
        for n in range(9):
            for w in elements_of_length(datum, n):
                if not is_lowest_cell(w):
                    continue
                if supp_delta(from_weyl(eta_delta(w))) != full:
                    continue
                kw = kottwitz_class(w)
                for b in bs:
                    if b.kappa != kw:
                        continue
                    dim = dim_adlv(w, b, engine=eng).dim
                    virtual = virtual_dimension(w, b)
                    checked += 1
                    if dim != virtual:
                        failures.append((label, element_literal(w), b.label, dim, virtual))
    elapsed = time.monotonic() - start
    ok = not failures and checked > 0 and elapsed < 300.0
    report(
        2,
        "dimension equals virtual dimension on the lowest cell",
        ok,
        f"{checked} pairs, {elapsed:.1f}s",
    )
    assert not failures, failures[:5]
    assert checked > 0 and elapsed < 300.0


# --- criterion 3: upper bound over straight classes ------------------------------


def test_acceptance_3_upper_bound():
    failures = []
    checked = skipped = 0
    for label in ("A2", "C2"):
        datum = build_root_datum(label)
        eng = engine(label)
        straights = [
            (BElement.from_element(rep, label=element_literal(rep)), rep)
            for rep, _ in enumerate_straight_classes(datum, None, 8)
        ]
        for n in range(9):
            for w in elements_of_length(datum, n):
                kw = kottwitz_class(w)
                for b, rep in straights:
                    if b.kappa != kw:
                        continue
                    if b.is_basic:
                        defect = None
                    elif rep.is_translation and all(c > 0 for c in b.newton):
                        defect = 0  # split torus centralizer
                    else:
                        skipped += 1
                        continue
                    dim = dim_adlv(w, b, engine=eng).dim
                    virtual = virtual_dimension(w, b, defect=defect)
                    checked += 1
                    if not (dim == EMPTY or dim <= virtual):
                        failures.append((label, element_literal(w), b.label, dim, virtual))
    ok = not failures and checked > 0
    report(
        3,
        "dimension bounded by virtual dimension",
        ok,
        f"{checked} pairs, {skipped} skipped",
    )
    assert not failures, failures[:5]
    assert checked > 0


# --- criterion 4: closed form on the affine Grassmannian -------------------------


def test_acceptance_4_grassmannian_closed_form():
    failures = []
    checked = 0
    for label in ("A1", "A2"):
        datum = build_root_datum(label)
        eng = engine(label)
        bs = basic_classes(datum)
        for mu in dominant_box(datum, 10):
            k_mu = kottwitz_class(translation(datum, mu))
            for b in bs:
                if b.kappa != k_mu:
                    if dim_grassmannian(mu, b, engine=eng, cross_check=False).dim != EMPTY:
                        failures.append((label, mu, b.label, "not empty"))
                    continue
                # cross_check also asserts the double-coset maximum sits at
                # the longest member and the partial-conjugation bound
                got = dim_grassmannian(mu, b, engine=eng, cross_check=True).dim
                closed = Fraction(
                    sum(r * (Fraction(m) - nb) for r, m, nb in zip(datum.rho2, mu, b.newton)),
                    2,
                ) - Fraction(defect_basic(b), 2)
                checked += 1
                if got != closed:
                    failures.append((label, mu, b.label, got, closed))
    ok = not failures and checked > 0
    report(4, "Grassmannian closed form and coset maximum", ok, f"{checked} pairs")
    assert not failures, failures[:5]
    assert checked > 0


# --- criterion 5: nonemptiness equivalence ---------------------------------------


def test_acceptance_5_mazur_equivalence():
    failures = []
    checked = 0
    for label in ("A2", "C2"):
        datum = build_root_datum(label)
        eng = engine(label)
        J = tuple(range(1, datum.rank + 1))
        for mu in dominant_box(datum, 8):
            for tau in omega_group(datum):
                b = BElement.from_element(tau, label=element_literal(tau))
                claim = mazur_check(mu, tau, J)
                truth = dim_grassmannian(mu, b, engine=eng, cross_check=False).nonempty
                checked += 1
                if claim != truth:
                    failures.append((label, mu, element_literal(tau), claim, truth))
    ok = not failures and checked > 0
    report(5, "nonemptiness criterion matches the dimension formula", ok, f"{checked} pairs")
    assert not failures, failures[:5]
    assert checked > 0


# --- criterion 6: property suite ---------------------------------------------------


def test_acceptance_6_property_suite():
    problems = []

    # (a) path independence, three strategies per element
    for label in ("A1", "A2", "C2"):
        datum = build_root_datum(label)
        for n in range(9):
            for w in elements_of_length(datum, n):
                if not verify_path_independence(w, trials=3, seed=0).ok:
                    problems.append(("path", label, element_literal(w)))

    # (b) nonnegativity, parity, degree bound, and (c) the v=1 indicator
    for label in ("A1", "A2", "C2"):
        datum = build_root_datum(label)
        eng = engine(label)
        for n in range(9):
            for w in elements_of_length(datum, n):
                table = eng.table(w)
                consts = 0
                own = class_key(w)
                for key, poly in table.items():
                    info = class_info(datum, None, key)
                    lo = info["length"]
                    if not poly.is_nonnegative:
                        problems.append(("nonneg", label, element_literal(w), key))
                    if poly.degree > n - lo:
                        problems.append(("degree", label, element_literal(w), key))
                    if any(
                        c and (k - (n - lo)) % 2 for k, c in enumerate(poly.coeffs)
                    ):
                        problems.append(("parity", label, element_literal(w), key))
                    consts += poly.constant_term
                    if key == own:
                        if poly.constant_term != 1:
                            problems.append(("v=1 own", label, element_literal(w)))
                        if not same_conjugacy_class(w, info["rep"]):
                            problems.append(("own class", label, element_literal(w)))
                if consts != 1:
                    problems.append(("v=1 total", label, element_literal(w)))

    # (d) class invariant constant along traces and random conjugations
    rng = random.Random(60)
    for label in ("A1", "A2", "C2"):
        datum = build_root_datum(label)
        for _ in range(500):
            x = random_element(datum, rng, 8)
            z = random_element(datum, rng, 6)
            if invariant_f(z * x * z.inverse()) != invariant_f(x):
                problems.append(("f conj", label, element_literal(x)))
        for _ in range(40):
            x = random_element(datum, rng, 10)
            m, trace = reduce_to_minimal(x)
            fx = invariant_f(x)
            if invariant_f(m) != fx or any(
                invariant_f(s.after) != fx for s in trace.steps
            ):
                problems.append(("f trace", label, element_literal(x)))

    # (e) straight-class descriptors stay injective (raises on collision)
    for label in ("A1", "A2", "C2"):
        enumerate_straight_classes(build_root_datum(label), None, 8)

    # (f) the word-length formula equals the hyperplane count
    for label in ("A1", "A2", "C2", "G2", "A2xA2"):
        datum = build_root_datum(label)
        rng = random.Random(label + "-acceptance")
        for _ in range(1000):
            x = random_element(datum, rng, 20)
            if x.length != hyperplane_length(x):
                problems.append(("length", label, element_literal(x)))

    # (g) every minimal element splits as finite-part times straight
    for label in ("A1", "A2", "C2"):
        datum = build_root_datum(label)
        for n in range(9):
            for x in elements_of_length(datum, n):
                if not is_minimal_in_class(x):
                    continue
                out = min2_decompose(x)
                good = (
                    out.finite_factor.length + out.straight.length == x.length
                    and invariant_f(out.straight) == invariant_f(x)
                    and same_conjugacy_class(out.finite_factor * out.straight, x)
                )
                if not good:
                    problems.append(("min2", label, element_literal(x)))

    # (h) leading-term law for products of basis elements
    rng = random.Random(61)
    a2 = build_root_datum("A2")
    for _ in range(200):
        x = random_element(a2, rng, 5)
        y = random_element(a2, rng, 5)
        prod = hecke_mul(t_basis(x), t_basis(y))
        star = demazure_product(x, y)
        gap = x.length + y.length - star.length
        if not all(p.is_nonnegative for p in prod.values()):
            problems.append(("cone", "A2", element_literal(x), element_literal(y)))
        if prod[star].coeff(gap) < 1:
            problems.append(("leading", "A2", element_literal(x), element_literal(y)))

    ok = not problems
    report(6, "property suite", ok, f"{len(problems)} problems")
    assert ok, problems[:10]


# --- criterion 7: point counts at superbasic classes -------------------------------
#
# The nonnegative-coefficient clause below is not a theorem: counts are
# nonnegative integer combinations of q^a (q-1)^k (the k-th coefficient of
# the class polynomial survives as a (q-1)^k factor), and for PGL_3 the
# count 3q^2(q-1) already occurs, whose q^2 coefficient is negative.  The
# clause is asserted as stated so the discrepancy stays visible; every
# other clause holds on every tested pair.


def test_acceptance_7_point_count_sanity():
    failures = []
    checked = 0
    for label in ("A1", "A2"):  # PGL_2 and PGL_3
        datum = build_root_datum(label)
        eng = engine(label)
        for x in omega_group(datum):
            if x.is_identity:
                continue
            b = BElement.from_element(x, label=element_literal(x))
            for n in range(9):
                for w in elements_of_length(datum, n):
                    if kottwitz_class(w) != b.kappa:
                        continue
                    count = point_count_superbasic_a(w, x, engine=eng)
                    dim = dim_adlv(w, b, engine=eng).dim
                    checked += 1
                    if not all(isinstance(c, int) for c in count):
                        failures.append(("integrality", label, element_literal(w)))
                    if any(c < 0 for c in count):
                        failures.append(
                            ("nonnegative coefficients", label,
                             element_literal(w), element_literal(x), count)
                        )
                    if (dim == EMPTY) != (count == ()):
                        failures.append(("zero iff empty", label, element_literal(w)))
                    if dim != EMPTY and len(count) - 1 != dim:
                        failures.append(("degree", label, element_literal(w)))
    ok = not failures and checked > 0
    report(7, "point-count sanity", ok, f"{checked} pairs, {len(failures)} failures")
    assert not failures, failures[:6]
    assert checked > 0
