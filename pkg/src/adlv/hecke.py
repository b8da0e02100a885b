"""T-basis arithmetic for the affine Hecke algebra and class polynomials.

Coefficients live in Z[xi] for xi = v - v^{-1}: the quadratic relation
``(T_s - v)(T_s + v^{-1}) = 0`` reads ``T_s^2 = xi T_s + 1``, so products of
T-basis elements only ever produce nonnegative integer xi-polynomials.

Class polynomials are computed by the descent recursion
``f_w = xi * f_{s w1} + f_{s w1 s'}`` over a same-length conjugation orbit,
with the base case the indicator of the class of a minimal-length element.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import BudgetError, IntegrityError
from .roots import RootDatum
from .elements import (
    AffineReflection,
    DiagramAut,
    ExtAffElt,
    coerce_delta,
    element_literal,
    omega_group,
    reduced_word,
    simple_reflections,
)
from .conjugacy import class_key

__all__ = [
    "XiPoly",
    "HeckeElt",
    "ClassPolyTable",
    "hecke_mul_basis",
    "hecke_mul",
    "t_basis",
    "ClassPolyEngine",
    "class_polynomials",
    "verify_path_independence",
]

NEG_INF = float("-inf")


class XiPoly:
    """Integer polynomial in xi = v - v^{-1}; coeffs[k] multiplies xi^k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = tuple(int(c) for c in coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        self.coeffs = coeffs

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        """Degree in xi; the zero polynomial has degree -inf."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def constant_term(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    @property
    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return XiPoly(tuple(x + y for x, y in zip(a, b)) + a[len(b):])

    def __mul__(self, other):
        if isinstance(other, int):
            return XiPoly(tuple(c * other for c in self.coeffs))
        if not isinstance(other, XiPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return XiPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return XiPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int = 1) -> "XiPoly":
        """Multiply by xi^k."""
        if self.is_zero:
            return self
        return XiPoly((0,) * k + self.coeffs)

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __eq__(self, other):
        return isinstance(other, XiPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.is_zero

    def format_xi(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                head = "" if c == 1 else f"{c}"
                power = "ξ" if k == 1 else f"ξ^{k}"
                parts.append(head + power)
        return " + ".join(parts)

    def v_coefficients(self) -> dict[int, int]:
        """Coefficients in Z[v, v^{-1}] after substituting xi = v - v^{-1}."""
        from math import comb

        out: dict[int, int] = {}
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for j in range(k + 1):
                power = k - 2 * j
                out[power] = out.get(power, 0) + c * comb(k, j) * (-1) ** j
        return {p: c for p, c in sorted(out.items(), reverse=True) if c != 0}

    def format_v(self) -> str:
        coeffs = self.v_coefficients()
        if not coeffs:
            return "0"
        parts = []
        for power, c in coeffs.items():
            if power == 0:
                term = str(abs(c))
            else:
                v = "v" if power == 1 else f"v^{power}"
                term = v if abs(c) == 1 else f"{abs(c)}{v}"
            if not parts:
                parts.append(("-" if c < 0 else "") + term)
            else:
                parts.append(("- " if c < 0 else "+ ") + term)
        return " ".join(parts)

    def jsonable(self):
        return {"xi_coeffs": list(self.coeffs)}

    @classmethod
    def from_jsonable(cls, data) -> "XiPoly":
        return cls(data["xi_coeffs"])

    def __repr__(self):
        return self.format_xi()


XiPoly.ZERO = XiPoly()
XiPoly.ONE = XiPoly((1,))
XiPoly.XI = XiPoly((0, 1))


HeckeElt = dict  # finitely supported {ExtAffElt: XiPoly}


def t_basis(x: ExtAffElt) -> HeckeElt:
    return {x: XiPoly.ONE}


def _resolve_reflection(datum: RootDatum, s):
    if isinstance(s, AffineReflection):
        return s.elt
    if isinstance(s, int):
        return simple_reflections(datum)[s]
    if isinstance(s, ExtAffElt):
        if s.length != 1:
            raise ValueError("not a simple reflection")
        return s
    raise TypeError(f"cannot interpret {s!r} as a simple reflection")


def hecke_mul_basis(x: ExtAffElt, s) -> HeckeElt:
    """T_x T_s: T_{xs} when the length goes up, else xi T_x + T_{xs}."""
    s = _resolve_reflection(x.datum, s)
    xs = x * s
    if xs.length > x.length:
        return {xs: XiPoly.ONE}
    return {x: XiPoly.XI, xs: XiPoly.ONE}


def _add_into(acc: HeckeElt, x: ExtAffElt, c: XiPoly):
    if c.is_zero:
        return
    cur = acc.get(x)
    acc[x] = c if cur is None else cur + c
    if acc[x].is_zero:
        del acc[x]


def hecke_mul(a: HeckeElt, b: HeckeElt) -> HeckeElt:
    """Product of two T-basis linear combinations."""
    out: HeckeElt = {}
    for y, cb in b.items():
        word, tau = reduced_word(y)
        refl = simple_reflections(y.datum)
        partial: HeckeElt = dict(a)
        for lab in word:
            nxt: HeckeElt = {}
            for x, c in partial.items():
                for z, piece in hecke_mul_basis(x, refl[lab]).items():
                    _add_into(nxt, z, c * piece)
            partial = nxt
        for x, c in partial.items():
            _add_into(out, x * tau, c * cb)
    return out


@dataclass
class ClassPolyTable:
    """Class polynomials of one element, keyed by canonical class keys."""

    element: str  # literal of the source element
    entries: dict[str, XiPoly] = field(default_factory=dict)

    def __eq__(self, other):
        return (
            isinstance(other, ClassPolyTable)
            and self.element == other.element
            and self.entries == other.entries
        )

    def poly(self, key: str) -> XiPoly:
        return self.entries.get(key, XiPoly.ZERO)

    def jsonable(self):
        return {
            "element": self.element,
            "table": {k: v.jsonable() for k, v in sorted(self.entries.items())},
        }

    @classmethod
    def from_jsonable(cls, data) -> "ClassPolyTable":
        return cls(
            element=data["element"],
            entries={
                k: XiPoly.from_jsonable(v) for k, v in data["table"].items()
            },
        )


class ClassPolyEngine:
    """Memoized class-polynomial computation for one (datum, delta) pair.

    ``choose`` picks among the available descent options ``(w1, i)`` found in
    the same-length orbit; the default takes the first in deterministic BFS
    order (labels ascending, then length-0 twists).  A randomized chooser
    exercises a different but provably equivalent recursion path.
    """

    def __init__(self, datum: RootDatum, delta: DiagramAut | None = None,
                 choose=None, budget: int = 10**6):
        self.datum = datum
        self.delta = coerce_delta(datum, delta)
        self.choose = choose
        self.budget = budget
        self.nodes = 0
        self.memo: dict[ExtAffElt, dict[str, XiPoly]] = {}

    def _descent_options(self, x: ExtAffElt, first_only: bool):
        """Pairs (w1, label) with w1 in the same-length orbit, conjugation drops."""
        delta = self.delta
        refl = simple_reflections(self.datum)
        omegas = [t for t in omega_group(self.datum) if not t.is_identity]
        seen = {x: None}
        queue = [x]
        options = []
        while queue:
            y = queue.pop(0)
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetError(
                    f"class polynomial search exceeded the {self.budget}-node budget"
                )
            for lab, s in refl.items():
                z = s * y * refl[delta.on_label(lab)]
                if z.length < y.length:
                    options.append((y, lab))
                    if first_only:
                        return options
                elif z.length == y.length and z not in seen:
                    seen[z] = None
                    queue.append(z)
            for tau in omegas:
                z = tau * y * delta(tau).inverse()
                if z not in seen:
                    seen[z] = None
                    queue.append(z)
        return options

    def table(self, x: ExtAffElt) -> dict[str, XiPoly]:
        if x in self.memo:
            return self.memo[x]
        options = self._descent_options(x, first_only=self.choose is None)
        if not options:
            result = {class_key(x, self.delta): XiPoly.ONE}
        else:
            w1, lab = options[0] if self.choose is None else self.choose(options)
            refl = simple_reflections(self.datum)
            down = refl[lab] * w1  # length(x) - 1
            down2 = down * refl[self.delta.on_label(lab)]  # length(x) - 2
            if not (down.length == x.length - 1 and down2.length == x.length - 2):
                raise IntegrityError("descent option does not drop as required")
            ta = self.table(down)
            tb = self.table(down2)
            result = {}
            for key, poly in ta.items():
                result[key] = poly.shift()
            for key, poly in tb.items():
                result[key] = result.get(key, XiPoly.ZERO) + poly
            result = {k: v for k, v in result.items() if not v.is_zero}
        self.memo[x] = result
        return result


def class_polynomials(
    x: ExtAffElt,
    delta: DiagramAut | None = None,
    engine: ClassPolyEngine | None = None,
) -> ClassPolyTable:
    """All nonzero class polynomials of x, keyed by canonical class keys."""
    if engine is None:
        engine = ClassPolyEngine(x.datum, delta)
    else:
        if engine.datum is not x.datum:
            raise ValueError("engine belongs to a different root datum")
    table = engine.table(x)
    return ClassPolyTable(
        element=element_literal(x),
        entries={k: table[k] for k in sorted(table)},
    )


@dataclass(frozen=True)
class PathIndependenceReport:
    element: str
    trials: int
    ok: bool
    divergences: tuple[str, ...]


def verify_path_independence(
    x: ExtAffElt,
    delta: DiagramAut | None = None,
    trials: int = 3,
    seed: int = 0,
) -> PathIndependenceReport:
    """Recompute the table under randomized descent choices and compare."""
    if trials < 2:
        raise ValueError("need at least two trials to compare")
    base = class_polynomials(x, delta)
    divergences = []
    for t in range(1, trials):
        rng = random.Random(f"{seed}:{t}:{element_literal(x)}")
        engine = ClassPolyEngine(x.datum, delta, choose=rng.choice)
        other = class_polynomials(x, delta, engine=engine)
        if other.entries != base.entries:
            divergences.append(
                f"trial {t}: {other.entries!r} != {base.entries!r}"
            )
    return PathIndependenceReport(
        element=element_literal(x),
        trials=trials,
        ok=not divergences,
        divergences=tuple(divergences),
    )
