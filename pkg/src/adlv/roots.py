"""Reduced root system tables and finite Weyl group arithmetic.

Conventions, fixed once for the whole package:

* Groups are adjoint, so the translation lattice P is the full coweight
  lattice.  Coweights are stored in the fundamental-coweight basis; the
  pairing with the i-th simple root is coordinate lookup,
  ``<v, alpha_i> = v[i-1]``.
* Roots are stored in the simple-root basis, so ``<v, a>`` is the dot
  product of the two coordinate tuples.
* Simple reflections carry 1-based labels ``1..rank``; label ``0`` and the
  negative labels are reserved for the affine reflections of the irreducible
  components (see :mod:`adlv.elements`).
* ``cartan[i][j] = <alpha_i^vee, alpha_j>`` (0-based storage).

>>> datum = build_root_datum("A2")
>>> len(datum.positive_roots), datum.rho2
(3, (2, 2))
"""

from __future__ import annotations

import re
from typing import Iterator

from .errors import ConfigError
from .lattices import (
    LatticeQuotient,
    dot,
    identity_matrix,
    mat_det,
    mat_inverse,
    mat_mul,
    mat_vec,
    vec_mat,
)

_LABEL_RE = re.compile(r"^([A-G])(\d+)$")

_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4, "E": 6, "F": 4, "G": 2}
_MAX_RANK = {"A": 8, "B": 8, "C": 8, "D": 8, "E": 8, "F": 4, "G": 2}


def _irreducible_cartan(letter: str, n: int):
    """0-based Cartan matrix of an irreducible type, Bourbaki numbering."""
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def bond(i, j):
        c[i][j] = -1
        c[j][i] = -1

    if letter in ("A", "B", "C"):
        for i in range(n - 1):
            bond(i, i + 1)
        if letter == "B" and n >= 2:
            c[n - 1][n - 2] = -2
        if letter == "C" and n >= 2:
            c[n - 2][n - 1] = -2
    elif letter == "D":
        for i in range(n - 3):
            bond(i, i + 1)
        bond(n - 3, n - 2)
        bond(n - 3, n - 1)
    elif letter == "E":
        chain = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
        for i, j in chain:
            if i < n and j < n:
                bond(i, j)
        bond(1, 3)
    elif letter == "F":
        bond(0, 1)
        bond(2, 3)
        c[1][2] = -1
        c[2][1] = -2
    elif letter == "G":
        c[0][1] = -3
        c[1][0] = -1
    return tuple(tuple(row) for row in c)


def parse_type_label(label: str):
    """Normalize a type label like ``"a2xc2"`` to component pairs."""
    parts = label.strip().upper().replace(" ", "").split("X")
    comps = []
    for part in parts:
        m = _LABEL_RE.match(part)
        if not m:
            raise ConfigError(f"unknown type label {label!r}")
        letter, rank = m.group(1), int(m.group(2))
        if not _MIN_RANK[letter] <= rank <= _MAX_RANK[letter]:
            raise ConfigError(f"unsupported type {part} (rank bounds)")
        comps.append((letter, rank))
    if not comps:
        raise ConfigError(f"unknown type label {label!r}")
    return tuple(comps)


class FiniteWeylElt:
    """An element of the finite Weyl group W.

    The canonical form is the integer matrix of the action on the coweight
    lattice in fundamental-coweight coordinates; instances are interned per
    root datum, so equal elements are identical objects.
    """

    __slots__ = ("datum", "mat", "_hash", "_inv", "_length", "_word")

    def __init__(self, datum, mat):
        self.datum = datum
        self.mat = mat
        self._hash = hash((datum.label, mat))
        self._inv = None
        self._length = None
        self._word = None

    def __eq__(self, other):
        return self is other or (
            isinstance(other, FiniteWeylElt)
            and self.datum is other.datum
            and self.mat == other.mat
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        word = self.reduced_word
        return "w(" + ("*".join(f"s{i}" for i in word) or "e") + ")"

    def coweight_action(self, v):
        if len(v) != self.datum.rank:
            raise ValueError("coweight has wrong dimension")
        return mat_vec(self.mat, v)

    def inverse_root_action(self, a):
        """The inverse element acting on a root vector."""
        return vec_mat(a, self.mat)

    def root_action(self, a):
        return vec_mat(a, self.inverse().mat)

    def __mul__(self, other):
        if not isinstance(other, FiniteWeylElt):
            return NotImplemented
        if self.datum is not other.datum:
            raise ValueError("elements belong to different root data")
        return self.datum.weyl_from_matrix(mat_mul(self.mat, other.mat))

    def inverse(self):
        if self._inv is None:
            inv = self.datum.weyl_from_matrix(mat_inverse(self.mat))
            self._inv = inv
            inv._inv = self
        return self._inv

    @property
    def length(self) -> int:
        if self._length is None:
            neg = 0
            for a in self.datum.positive_roots:
                b = self.inverse_root_action(a)
                if any(c < 0 for c in b):
                    neg += 1
            self._length = neg
        return self._length

    @property
    def is_identity(self) -> bool:
        return self is self.datum.identity_weyl

    def has_left_descent(self, i: int) -> bool:
        """True when length(s_i * w) < length(w); i is a 1-based label."""
        return any(c < 0 for c in self.mat[i - 1])

    def has_right_descent(self, i: int) -> bool:
        a = self.root_action(self.datum.simple_root(i))
        return any(c < 0 for c in a)

    @property
    def reduced_word(self):
        """Reduced word, greedy smallest-label-first left descents."""
        if self._word is None:
            word = []
            u = self
            while not u.is_identity:
                for i in range(1, self.datum.rank + 1):
                    if u.has_left_descent(i):
                        word.append(i)
                        u = self.datum.simple_weyl(i) * u
                        break
                else:  # pragma: no cover - impossible for a Weyl element
                    raise RuntimeError("no descent found")
            self._word = tuple(word)
        return self._word


class RootDatum:
    """Root system tables for an adjoint group; build via build_root_datum."""

    def __init__(self, label: str):
        comps = parse_type_label(label)
        self.label = "x".join(f"{letter}{rank}" for letter, rank in comps)
        self.rank = sum(rank for _, rank in comps)
        starts = []
        pos = 0
        for _, rank in comps:
            starts.append(pos)
            pos += rank
        self.components = tuple(
            (letter, rank, start) for (letter, rank), start in zip(comps, starts)
        )

        r = self.rank
        cartan = [[0] * r for _ in range(r)]
        for letter, rank, start in self.components:
            block = _irreducible_cartan(letter, rank)
            for i in range(rank):
                for j in range(rank):
                    cartan[start + i][start + j] = block[i][j]
        self.cartan = tuple(tuple(row) for row in cartan)
        # alpha_i^vee in fundamental-coweight coordinates is cartan row i-1
        self.simple_coroots = self.cartan

        self._weyl_cache: dict = {}
        self._id_weyl = self.weyl_from_matrix(identity_matrix(r))
        self._simple_weyl = {}
        self._build_positive_roots()
        self.rho2 = tuple(
            sum(a[i] for a in self.positive_roots) for i in range(r)
        )
        self.fundamental_group = LatticeQuotient(r, self.simple_coroots)
        orders = [d for d in self.fundamental_group.orders if d != 1]
        self.fundamental_group_orders = tuple(sorted(orders))
        order = self.fundamental_group.group_order()
        if order != abs(int(mat_det(self.cartan))):
            raise AssertionError("fundamental group order mismatch")
        self._w0 = None
        self._weyl_levels = None

    def _build_positive_roots(self):
        r = self.rank
        found = {}
        queue = []
        for i in range(r):
            root = tuple(1 if j == i else 0 for j in range(r))
            found[root] = self.cartan[i]
            queue.append(root)
        while queue:
            a = queue.pop()
            av = found[a]
            for i in range(r):
                pairing = sum(self.cartan[i][j] * a[j] for j in range(r))
                b = tuple(
                    a[j] - pairing * (1 if j == i else 0) for j in range(r)
                )
                if all(c >= 0 for c in b) and b not in found:
                    # reflecting (a, a^vee) by s_i keeps them paired
                    found[b] = self.simple_weyl_action(i + 1, av)
                    queue.append(b)
        ordered = sorted(found, key=lambda a: (sum(a), a))
        self.positive_roots = tuple(ordered)
        self.positive_coroots = tuple(found[a] for a in ordered)
        self.root_index = {a: k for k, a in enumerate(ordered)}
        highest = []
        for letter, rank, start in self.components:
            in_comp = [
                a
                for a in ordered
                if all(start <= j < start + rank or a[j] == 0 for j in range(self.rank))
            ]
            theta = max(in_comp, key=lambda a: (sum(a), a))
            highest.append((theta, found[theta]))
        self.highest_roots = tuple(highest)

    def simple_weyl_action(self, i: int, v):
        """Apply s_i to a coweight vector; i is a 1-based label."""
        c = v[i - 1]
        if c == 0:
            return tuple(v)
        row = self.cartan[i - 1]
        return tuple(x - c * y for x, y in zip(v, row))

    def simple_root(self, i: int):
        return tuple(1 if j == i - 1 else 0 for j in range(self.rank))

    def weyl_from_matrix(self, mat) -> FiniteWeylElt:
        try:
            return self._weyl_cache[mat]
        except KeyError:
            elt = FiniteWeylElt(self, mat)
            self._weyl_cache[mat] = elt
            return elt

    @property
    def identity_weyl(self) -> FiniteWeylElt:
        return self._id_weyl

    def simple_weyl(self, i: int) -> FiniteWeylElt:
        if i not in self._simple_weyl:
            if not 1 <= i <= self.rank:
                raise ValueError(f"no simple reflection with label {i}")
            r = self.rank
            mat = tuple(
                tuple(
                    (1 if k == j else 0) - (self.cartan[i - 1][k] if j == i - 1 else 0)
                    for j in range(r)
                )
                for k in range(r)
            )
            self._simple_weyl[i] = self.weyl_from_matrix(mat)
        return self._simple_weyl[i]

    def reflection_in_root(self, root, coroot) -> FiniteWeylElt:
        """Reflection v -> v - <v, root> * coroot as a Weyl element."""
        r = self.rank
        mat = tuple(
            tuple((1 if k == j else 0) - coroot[k] * root[j] for j in range(r))
            for k in range(r)
        )
        return self.weyl_from_matrix(mat)

    def pairing(self, v, a):
        """<v, a> for a coweight v and a root a."""
        return dot(a, v)

    def pairing_2rho(self, v):
        return dot(self.rho2, v)

    def component_of_node(self, i: int) -> int:
        """Component index of a finite node (1-based label)."""
        for idx, (_, rank, start) in enumerate(self.components):
            if start < i <= start + rank:
                return idx
        raise ValueError(f"no finite node with label {i}")

    def w0(self) -> FiniteWeylElt:
        if self._w0 is None:
            _, w = dominant_rep(self, tuple([-1] * self.rank))
            self._w0 = w
        return self._w0

    def longest_in(self, J) -> FiniteWeylElt:
        """Longest element of the (finite) standard parabolic W_J, J subset of S."""
        J = sorted(set(J))
        for i in J:
            if not 1 <= i <= self.rank:
                raise ValueError(f"label {i} is not a finite simple reflection")
        v = tuple(-1 if (i + 1) in J else 0 for i in range(self.rank))
        w = self.identity_weyl
        while True:
            for i in J:
                if w.coweight_action(v)[i - 1] < 0:
                    w = self.simple_weyl(i) * w
                    break
            else:
                return w.inverse()

    def __eq__(self, other):
        return isinstance(other, RootDatum) and self.label == other.label

    def __hash__(self):
        return hash(self.label)

    def __repr__(self):
        return f"RootDatum({self.label!r})"


_DATUM_CACHE: dict[str, RootDatum] = {}


def build_root_datum(label: str) -> RootDatum:
    comps = parse_type_label(label)
    key = "x".join(f"{letter}{rank}" for letter, rank in comps)
    if key not in _DATUM_CACHE:
        _DATUM_CACHE[key] = RootDatum(key)
    return _DATUM_CACHE[key]


def weyl_act(w: FiniteWeylElt, v):
    """Apply w to a coweight vector (fundamental-coweight coordinates)."""
    return w.coweight_action(tuple(v))


def dominant_rep(datum: RootDatum, v):
    """Dominant representative of the W-orbit of v, with the minimizing element.

    Returns ``(vbar, w)`` where ``w(v) = vbar`` is dominant and w has minimal
    length among elements doing so.  Works for integer or Fraction entries.
    """
    v = tuple(v)
    if len(v) != datum.rank:
        raise ValueError("coweight has wrong dimension")
    w = datum.identity_weyl
    u = v
    while True:
        for i in range(1, datum.rank + 1):
            if u[i - 1] < 0:
                u = datum.simple_weyl_action(i, u)
                w = datum.simple_weyl(i) * w
                break
        else:
            return u, w


def is_dominant(v) -> bool:
    return all(c >= 0 for c in v)


def zero_pairing_set(datum: RootDatum, mu) -> tuple[int, ...]:
    """Simple labels pairing to zero with a dominant coweight."""
    mu = tuple(mu)
    if not is_dominant(mu):
        raise ValueError("coweight is not dominant")
    return tuple(i + 1 for i in range(datum.rank) if mu[i] == 0)


def weyl_group(datum: RootDatum) -> tuple[FiniteWeylElt, ...]:
    """All of W, ordered by (length, reduced word); cached on the datum."""
    if datum._weyl_levels is None:
        levels = [[datum.identity_weyl]]
        seen = {datum.identity_weyl}
        while levels[-1]:
            nxt = []
            for w in levels[-1]:
                for i in range(1, datum.rank + 1):
                    u = w * datum.simple_weyl(i)
                    if u not in seen and u.length == w.length + 1:
                        seen.add(u)
                        nxt.append(u)
            nxt.sort(key=lambda u: u.reduced_word)
            levels.append(nxt)
        datum._weyl_levels = tuple(w for level in levels for w in level)
    return datum._weyl_levels


def min_coset_reps(
    datum: RootDatum, J, side: str = "left", max_length: int | None = None
) -> Iterator[FiniteWeylElt]:
    """Stream the minimal coset representatives of W_J in W by length.

    ``side='left'`` yields the minimal representatives of the cosets
    ``W_J w`` (no left descent in J); ``side='right'`` those of ``w W_J``.
    """
    J = set(J)
    for i in J:
        if not 1 <= i <= datum.rank:
            raise ValueError(
                f"label {i} does not generate a finite reflection subgroup of W"
            )
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")

    def minimal(w):
        if side == "left":
            return not any(w.has_left_descent(i) for i in J)
        return not any(w.has_right_descent(i) for i in J)

    # the minimal representatives are closed under removing a letter on the
    # side opposite to the descent condition, so grow them from there
    level = [datum.identity_weyl]
    seen = {datum.identity_weyl}
    length = 0
    while level:
        if max_length is not None and length > max_length:
            return
        yield from level
        nxt = []
        for w in level:
            for i in range(1, datum.rank + 1):
                s = datum.simple_weyl(i)
                u = w * s if side == "left" else s * w
                if u.length == w.length + 1 and u not in seen and minimal(u):
                    seen.add(u)
                    nxt.append(u)
        nxt.sort(key=lambda u: u.reduced_word)
        level = nxt
        length += 1


def in_parabolic(w: FiniteWeylElt, J) -> bool:
    """Membership of w in the standard parabolic W_J, J a set of finite labels."""
    J = set(J)
    u = w
    while not u.is_identity:
        for i in J:
            if u.has_left_descent(i):
                u = w.datum.simple_weyl(i) * u
                break
        else:
            return False
    return True
