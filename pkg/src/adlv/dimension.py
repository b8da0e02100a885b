"""Dimensions of affine Deligne-Lusztig varieties from class polynomials.

The dimension of X_w(b) is the maximum of (len(w) + len(O) + deg f_{w,O})/2
over the twisted classes O whose invariant matches b, minus <nu_b, 2 rho>;
the variety is empty exactly when every matching class polynomial vanishes.
Emptiness is encoded by the sentinel ``EMPTY`` (= -inf), which compares
correctly against every candidate dimension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import IntegrityError
from .lattices import LatticeQuotient, dot
from .roots import RootDatum, is_dominant, min_coset_reps, weyl_group, in_parabolic
from .elements import (
    DiagramAut,
    ExtAffElt,
    coerce_delta,
    element_literal,
    eta_delta,
    from_weyl,
    is_lowest_cell,
    omega_group,
    simple_reflections,
    supp_delta,
    translation,
)
from .conjugacy import (
    SigmaClassDescriptor,
    class_info,
    invariant_f,
    is_minimal_in_class,
    kottwitz_class,
    newton_point,
    raw_newton_point,
)
from .hecke import ClassPolyEngine, class_polynomials

__all__ = [
    "EMPTY",
    "BElement",
    "ClassContribution",
    "DimReport",
    "dim_adlv",
    "dim_grassmannian",
    "mazur_check",
    "defect_basic",
    "virtual_dimension",
    "GhkrReport",
    "ghkr_check",
    "point_count_superbasic_a",
    "format_q_poly",
]

EMPTY = float("-inf")


def _as_number(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class BElement:
    """A sigma-conjugacy class, held as its combinatorial invariant."""

    datum: RootDatum
    delta_perm: tuple[int, ...]
    descriptor: SigmaClassDescriptor
    label: str = "b"

    @classmethod
    def from_element(cls, x: ExtAffElt, delta: DiagramAut | None = None,
                     label: str | None = None) -> "BElement":
        delta = coerce_delta(x.datum, delta)
        return cls(
            datum=x.datum,
            delta_perm=delta.perm,
            descriptor=invariant_f(x, delta),
            label=label if label is not None else element_literal(x),
        )

    @classmethod
    def from_descriptor(cls, datum: RootDatum, delta, newton, kappa,
                        label: str = "b") -> "BElement":
        delta = coerce_delta(datum, delta)
        desc = SigmaClassDescriptor(
            newton=tuple(Fraction(c) for c in newton), kappa=tuple(kappa)
        )
        if not is_dominant(desc.newton):
            raise ValueError("Newton vector must be dominant")
        return cls(datum=datum, delta_perm=delta.perm, descriptor=desc, label=label)

    @classmethod
    def unit(cls, datum: RootDatum, delta: DiagramAut | None = None) -> "BElement":
        delta = coerce_delta(datum, delta)
        return cls.from_element(
            from_weyl(datum.identity_weyl), delta, label="unit"
        )

    @property
    def delta(self) -> DiagramAut:
        return DiagramAut(self.datum, self.delta_perm)

    @property
    def newton(self):
        return self.descriptor.newton

    @property
    def kappa(self):
        return self.descriptor.kappa

    @property
    def newton_pairing_2rho(self) -> Fraction:
        return Fraction(dot(self.datum.rho2, self.newton))

    @property
    def is_basic(self) -> bool:
        """Newton vector matches the length-0 class with the same Kottwitz class."""
        delta = self.delta
        for tau in omega_group(self.datum):
            if kottwitz_class(tau, delta) == self.kappa:
                tau_value = dot(self.datum.rho2, newton_point(tau, delta))
                return self.newton_pairing_2rho == tau_value
        raise IntegrityError("no length-0 element matches the Kottwitz class")


@dataclass(frozen=True)
class ClassContribution:
    rep: str
    length: int
    degree: int
    candidate: Fraction  # (len(w) + len(O) + deg f) / 2

    def jsonable(self):
        value = _as_number(self.candidate)
        return {
            "rep": self.rep,
            "len": self.length,
            "deg": self.degree,
            "candidate": value if isinstance(value, int) else str(value),
        }


@dataclass
class DimReport:
    input: dict
    contributions: list[ClassContribution]
    dim: object  # Fraction/int, or EMPTY
    nonempty: bool
    newton_drop: Fraction  # <nu_b, 2 rho>
    virtual_dim: object = None
    bounds: dict = field(default_factory=dict)

    def dim_display(self):
        if self.dim == EMPTY:
            return "EMPTY"
        return _as_number(self.dim)

    def jsonable(self):
        dim = self.dim_display()
        vd = self.virtual_dim
        if isinstance(vd, Fraction):
            vd = _as_number(vd)
            if not isinstance(vd, int):
                vd = str(vd)
        return {
            "schema_version": 1,
            "input": self.input,
            "classes": [c.jsonable() for c in self.contributions],
            "dim": dim if isinstance(dim, (int, str)) else str(dim),
            "nonempty": self.nonempty,
            "virtual_dim": vd,
            "bounds": self.bounds,
        }


def dim_adlv(
    w: ExtAffElt,
    b: BElement,
    delta: DiagramAut | None = None,
    engine: ClassPolyEngine | None = None,
) -> DimReport:
    """Dimension of X_w(b) by the degree formula over matching classes."""
    delta = coerce_delta(w.datum, delta)
    if b.delta_perm != delta.perm:
        raise ValueError("b was formed for a different twist")
    table = class_polynomials(w, delta, engine=engine)
    contributions = []
    best = EMPTY
    for key, poly in table.entries.items():
        info = class_info(w.datum, delta, key)
        if info["descriptor"] != b.descriptor:
            continue
        cand = Fraction(w.length + info["length"] + poly.degree, 2)
        contributions.append(
            ClassContribution(
                rep=key, length=info["length"], degree=poly.degree, candidate=cand
            )
        )
        if cand > best:
            best = cand
    drop = b.newton_pairing_2rho
    dim = EMPTY if best == EMPTY else best - drop
    return DimReport(
        input={
            "element": element_literal(w),
            "b": b.descriptor.jsonable() | {"label": b.label},
            "type": w.datum.label,
        },
        contributions=sorted(contributions, key=lambda c: c.rep),
        dim=dim,
        nonempty=dim != EMPTY,
        newton_drop=drop,
    )


def _double_coset(datum: RootDatum, mu) -> list[ExtAffElt]:
    """All elements x t^mu y with y minimal for the stabilizer of mu."""
    stab = [i + 1 for i in range(datum.rank) if mu[i] == 0]
    t_mu = translation(datum, mu)
    out = []
    for x in weyl_group(datum):
        for y in min_coset_reps(datum, stab, side="left"):
            out.append(from_weyl(x) * t_mu * from_weyl(y))
    return out


def dim_grassmannian(
    mu,
    b: BElement,
    delta: DiagramAut | None = None,
    engine: ClassPolyEngine | None = None,
    cross_check: bool = True,
) -> DimReport:
    """Dimension of X_mu(b) in the affine Grassmannian.

    Evaluates the maximal element w0 t^mu of its coset and subtracts the
    longest-element length; with ``cross_check`` the whole double coset is
    swept to confirm the maximum sits at w0 t^mu and that each member obeys
    the partial-conjugation bound.
    """
    datum = b.datum
    mu = tuple(mu)
    if not is_dominant(mu):
        raise ValueError("coweight must be dominant")
    delta = coerce_delta(datum, delta)
    if engine is None:
        engine = ClassPolyEngine(datum, delta)
    w0 = datum.w0()
    top = from_weyl(w0) * translation(datum, mu)
    report = dim_adlv(top, b, delta, engine=engine)
    l0 = w0.length
    dim = EMPTY if report.dim == EMPTY else report.dim - l0
    bounds = {}
    if cross_check:
        best = EMPTY
        for elt in _double_coset(datum, mu):
            r = dim_adlv(elt, b, delta, engine=engine)
            x_w, _, _ = _coset_coords(elt)
            limit = report.dim - l0 + x_w.length
            if not (r.dim == EMPTY or r.dim <= limit):
                raise IntegrityError(
                    f"partial-conjugation bound fails at {element_literal(elt)}"
                )
            if r.dim != EMPTY and (best == EMPTY or r.dim > best):
                best = r.dim
        if best != report.dim:
            raise IntegrityError(
                "double-coset maximum is not attained at the longest member"
            )
        bounds["coset_max"] = "checked"
    return DimReport(
        input={
            "grassmannian_coweight": list(mu),
            "b": b.descriptor.jsonable() | {"label": b.label},
            "type": datum.label,
        },
        contributions=report.contributions,
        dim=dim,
        nonempty=dim != EMPTY,
        newton_drop=report.newton_drop,
        bounds=bounds,
    )


def _coset_coords(elt: ExtAffElt):
    from .elements import double_coset_form

    return double_coset_form(elt)


# ---------------------------------------------------------------------------
# The nonemptiness criterion on the Grassmannian


def _levi_kappa_quotient(datum: RootDatum, J, delta: DiagramAut) -> LatticeQuotient:
    gens = [datum.simple_coroots[j - 1] for j in J]
    for i in range(datum.rank):
        e = tuple(1 if k == i else 0 for k in range(datum.rank))
        de = delta.on_coweight(e)
        gens.append(tuple(a - b for a, b in zip(e, de)))
    return LatticeQuotient(datum.rank, gens)


def _delta_orbits(labels, delta: DiagramAut):
    labels = set(labels)
    out = []
    while labels:
        seed = min(labels)
        orbit = {seed}
        j = delta.on_label(seed)
        while j != seed:
            orbit.add(j)
            j = delta.on_label(j)
        out.append(tuple(sorted(orbit)))
        labels -= orbit
    return out


def mazur_check(
    mu,
    levi_rep: ExtAffElt,
    J,
    delta: DiagramAut | None = None,
) -> bool:
    """Nonemptiness test for X_mu(b) when b is basic inside the Levi of J.

    ``levi_rep`` represents b inside P x W_J; the test asks whether the image
    of mu minus the Levi Kottwitz point of b is a nonnegative integral
    combination of the images of the simple coroots outside J in the
    delta-coinvariants of P modulo the J-coroots.
    """
    datum = levi_rep.datum
    delta = coerce_delta(datum, delta)
    mu = tuple(mu)
    if not is_dominant(mu):
        raise ValueError("coweight must be dominant")
    J = tuple(sorted(set(J)))
    if any(not 1 <= j <= datum.rank for j in J):
        raise ValueError("J must consist of finite simple labels")
    if tuple(sorted(delta.on_label(j) for j in J)) != J:
        raise ValueError("J must be delta-stable")
    if not in_parabolic(levi_rep.w, J):
        raise ValueError("representative does not lie in the Levi subgroup")
    nu = raw_newton_point(levi_rep, delta)
    if any(nu[j - 1] != 0 for j in J):
        raise ValueError("representative is not basic for its Levi")
    if not is_dominant(nu):
        raise ValueError("Levi Kottwitz point does not meet the dominant cone")

    quotient = _levi_kappa_quotient(datum, J, delta)
    diff = tuple(a - b for a, b in zip(mu, levi_rep.mu))
    target = quotient.reduce(diff)
    orbits = _delta_orbits(
        [i for i in range(1, datum.rank + 1) if i not in J], delta
    )
    gens = [quotient.reduce(datum.simple_coroots[o[0] - 1]) for o in orbits]
    orders = [quotient.order_of(datum.simple_coroots[o[0] - 1]) for o in orbits]
    free_rows = [i for i, d in enumerate(quotient.orders) if d == 0]

    # coefficients of infinite-order generators are pinned by the free rows;
    # finite-order generators only matter modulo their order
    infinite = [k for k, d in enumerate(orders) if d == 0]
    finite = [k for k, d in enumerate(orders) if d != 0]

    def torsion_matches(coeffs):
        # gens and target are already in canonical quotient coordinates
        total = [0] * datum.rank
        for k, c in enumerate(coeffs):
            for i in range(datum.rank):
                total[i] += c * gens[k][i]
        for i, d in enumerate(quotient.orders):
            if d == 0:
                if total[i] != target[i]:
                    return False
            elif total[i] % d != target[i] % d:
                return False
        return True

    if infinite:
        # solve the free-row system exactly; generators with a free image are
        # linearly independent there modulo torsion, so solutions are unique
        rows = [[Fraction(gens[k][i]) for k in infinite] for i in free_rows]
        rhs = [Fraction(target[i]) for i in free_rows]
        sol, consistent = _solve_exact(rows, rhs)
        if not consistent:
            return False
        coeffs_inf = []
        for value in sol:
            if value.denominator != 1 or value < 0:
                return False
            coeffs_inf.append(int(value))
    else:
        coeffs_inf = []
        if any(target[i] != 0 for i in free_rows):
            return False

    ranges = [range(orders[k]) for k in finite]
    for combo in itertools.product(*ranges):
        coeffs = [0] * len(gens)
        for k, c in zip(infinite, coeffs_inf):
            coeffs[k] = c
        for k, c in zip(finite, combo):
            coeffs[k] = c
        if torsion_matches(coeffs):
            return True
    return False


def _solve_exact(rows, rhs):
    """Least-structure exact solve of rows @ x = rhs; returns (x, consistent).

    Requires the columns to be linearly independent; raises otherwise.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pivot is None:
            raise IntegrityError("cone generators are not independent")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        scale = aug[r][c]
        aug[r] = [v / scale for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if aug[i][n] != 0:
            return None, False
    return [aug[i][n] for i in range(n)], True


# ---------------------------------------------------------------------------
# Defect and virtual dimension


def _ad_delta_perm(tau: ExtAffElt, delta: DiagramAut) -> dict[int, int]:
    """The permutation of S~ labels given by s -> tau * delta(s) * tau^{-1}."""
    from .elements import omega_conjugation_perm

    conj = omega_conjugation_perm(tau)
    return {lab: conj[delta.on_label(lab)] for lab in conj}


def _perm_orbits(perm: dict[int, int]):
    labels = set(perm)
    out = []
    while labels:
        seed = min(labels)
        orbit = {seed}
        j = perm[seed]
        while j != seed:
            orbit.add(j)
            j = perm[j]
        out.append(tuple(sorted(orbit)))
        labels -= orbit
    return out


def defect_basic(b: BElement, delta: DiagramAut | None = None) -> int:
    """Defect of a basic class via twisted Coxeter elements.

    For the length-0 representative tau, every maximal proper subset of the
    affine labels stable under conjugation-by-tau composed with delta admits
    a twisted Coxeter element c with c tau minimal in its class and carrying
    the invariant of b; the defect is the number of delta-orbits on the
    finite labels minus len(c), and all successful choices must agree.
    """
    datum = b.datum
    if len(datum.components) != 1:
        raise ValueError("defect computation requires an irreducible type")
    delta = coerce_delta(datum, delta)
    if delta.perm != b.delta_perm:
        raise ValueError("b was formed for a different twist")
    if not b.is_basic:
        raise ValueError("defect search needs a basic class")
    tau = None
    for cand in omega_group(datum):
        if invariant_f(cand, delta) == b.descriptor:
            tau = cand
            break
    if tau is None:
        raise ValueError("no length-0 representative matches the class")
    phi = _ad_delta_perm(tau, delta)
    orbits = _perm_orbits(phi)
    refl = simple_reflections(datum)
    lengths = set()
    for removed in orbits:
        J = [lab for lab in phi if lab not in removed]
        sub_orbits = _perm_orbits({j: phi[j] for j in J}) if J else []
        choices = [orb for orb in sub_orbits]
        for reps in itertools.product(*choices) if choices else [()]:
            for order in itertools.permutations(reps):
                c = from_weyl(datum.identity_weyl)
                for lab in order:
                    c = c * refl[lab]
                if c.length != len(order):
                    raise IntegrityError("twisted Coxeter word is not reduced")
                ctau = c * tau
                if invariant_f(ctau, delta) != b.descriptor:
                    continue
                if not is_minimal_in_class(ctau, delta):
                    continue
                lengths.add(c.length)
                break
            else:
                continue
            break
    if not lengths:
        raise IntegrityError("no twisted Coxeter element matches the basic class")
    if len(lengths) != 1:
        raise IntegrityError(f"twisted Coxeter lengths disagree: {sorted(lengths)}")
    n = len(_delta_orbits(range(1, datum.rank + 1), delta))
    return n - lengths.pop()


def virtual_dimension(
    w: ExtAffElt,
    b: BElement,
    delta: DiagramAut | None = None,
    defect: int | None = None,
) -> Fraction:
    """(len(w) + len(eta(w)) - def(b)) / 2 - <nu_b, rho>.

    Requires the Kottwitz classes of w and b to agree; the defect is computed
    for basic b and must be supplied explicitly otherwise.
    """
    delta = coerce_delta(w.datum, delta)
    if kottwitz_class(w, delta) != b.kappa:
        raise ValueError("Kottwitz classes of the element and b differ")
    if defect is None:
        if not b.is_basic:
            raise ValueError("non-basic b needs an explicit defect")
        defect = defect_basic(b, delta)
    eta = eta_delta(w, delta)
    return (
        Fraction(w.length + eta.length - defect, 2)
        - Fraction(dot(w.datum.rho2, b.newton), 2)
    )


@dataclass(frozen=True)
class GhkrReport:
    element: str
    b_label: str
    dim: object
    virtual: object
    kappa_match: bool
    lower_applicable: bool
    lower_holds: bool | None
    upper_applicable: bool
    upper_holds: bool | None
    equality_applicable: bool
    equality_holds: bool | None

    def jsonable(self):
        def num(x):
            if x is None or isinstance(x, (bool, str)):
                return x
            if x == EMPTY:
                return "EMPTY"
            v = _as_number(x)
            return v if isinstance(v, int) else str(v)

        return {
            "element": self.element,
            "b": self.b_label,
            "dim": num(self.dim),
            "virtual_dim": num(self.virtual),
            "kappa_match": self.kappa_match,
            "lower": {"applicable": self.lower_applicable, "holds": self.lower_holds},
            "upper": {"applicable": self.upper_applicable, "holds": self.upper_holds},
            "equal": {
                "applicable": self.equality_applicable,
                "holds": self.equality_holds,
            },
        }


def ghkr_check(
    w: ExtAffElt,
    b: BElement,
    delta: DiagramAut | None = None,
    engine: ClassPolyEngine | None = None,
) -> GhkrReport:
    """Compare the true dimension against the virtual dimension.

    The lower bound applies to basic b and elements of the lowest two-sided
    cell whose finite invariant has full support; the upper bound applies to
    the untwisted case.  Failed hypotheses are recorded, never raised.
    """
    delta = coerce_delta(w.datum, delta)
    report = dim_adlv(w, b, delta, engine=engine)
    kappa_match = kottwitz_class(w, delta) == b.kappa
    virtual = None
    if kappa_match and b.is_basic:
        virtual = virtual_dimension(w, b, delta)
    lower_applicable = (
        kappa_match
        and b.is_basic
        and len(w.datum.components) == 1
        and is_lowest_cell(w)
        and supp_delta(from_weyl(eta_delta(w, delta)), delta)
        == frozenset(range(1, w.datum.rank + 1))
    )
    upper_applicable = kappa_match and b.is_basic and delta.is_identity
    lower_holds = (report.dim >= virtual) if lower_applicable else None
    upper_holds = (report.dim <= virtual) if upper_applicable else None
    equality_applicable = lower_applicable and upper_applicable
    equality_holds = (report.dim == virtual) if equality_applicable else None
    return GhkrReport(
        element=element_literal(w),
        b_label=b.label,
        dim=report.dim,
        virtual=virtual,
        kappa_match=kappa_match,
        lower_applicable=lower_applicable,
        lower_holds=lower_holds,
        upper_applicable=upper_applicable,
        upper_holds=upper_holds,
        equality_applicable=equality_applicable,
        equality_holds=equality_holds,
    )


# ---------------------------------------------------------------------------
# Point counts over F_q for superbasic classes in type A


def _is_superbasic_omega(x: ExtAffElt, delta: DiagramAut) -> bool:
    if x.length != 0:
        return False
    perm = _ad_delta_perm(x, delta)
    orbits = _perm_orbits(perm)
    datum = x.datum
    comps = []
    for c, (_, rank, start) in enumerate(datum.components):
        comps.append(frozenset({-c} | set(range(start + 1, start + rank + 1))))
    for orbit in orbits:
        touched = {comp for comp in comps if set(orbit) & comp}
        if set(orbit) != set().union(*touched):
            return False
    return True


def point_count_superbasic_a(
    w: ExtAffElt,
    x: ExtAffElt,
    delta: DiagramAut | None = None,
    engine: ClassPolyEngine | None = None,
) -> tuple[int, ...]:
    """Rational points of X_w over F_q at a superbasic class, type A only.

    Returns the coefficients (ascending powers of q) of
    ``n * q^{len(w)/2} * f_{w,O}`` after substituting v = sqrt(q); the parity
    of the class polynomial guarantees integrality.
    """
    datum = w.datum
    delta = coerce_delta(datum, delta)
    if not delta.is_identity:
        raise ValueError("point counts are implemented for the untwisted case")
    if len(datum.components) != 1 or datum.components[0][0] != "A":
        raise ValueError("point counts require an irreducible type A datum")
    if not _is_superbasic_omega(x, delta):
        raise ValueError("x must be a superbasic length-0 element")
    from math import comb

    from .conjugacy import class_key

    n = len(omega_group(datum))
    key = class_key(x, delta)
    table = class_polynomials(w, delta, engine=engine)
    poly = table.poly(key)
    if poly.is_zero:
        return ()
    out = [0] * (((w.length + poly.degree) // 2) + 1)
    for k, c in enumerate(poly.coeffs):
        if c == 0:
            continue
        if (w.length - k) % 2 != 0:
            raise IntegrityError("parity violation in a class polynomial")
        base = (w.length - k) // 2
        # c * q^base * (q-1)^k
        for j in range(k + 1):
            out[base + j] += n * c * comb(k, j) * (-1) ** (k - j)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def format_q_poly(coeffs) -> str:
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        if k == 0:
            term = str(abs(c))
        else:
            q = "q" if k == 1 else f"q^{k}"
            term = q if abs(c) == 1 else f"{abs(c)}{q}"
        if not parts:
            parts.append(("-" if c < 0 else "") + term)
        else:
            parts.append(("- " if c < 0 else "+ ") + term)
    return " ".join(parts)
