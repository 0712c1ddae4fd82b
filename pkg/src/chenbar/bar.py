"""Reduced bar complex of constant forms, Hodge and weight filtrations, ideals I and Ibar.

A bar word ``[w_1|...|w_s]`` is stored as a tuple of basis monomials, each an
increasing tuple of letter positions (see :mod:`chenbar.torus`); pure-letter
words have only 1-tuples. Words built from arbitrary constant forms are
expanded multilinearly, so a :class:`BarElement` is always a combination of
basis words and equality is structural.

Homotopy functionals of length <= s are represented by the strictly closed
elements ``d_C x = 0``, ``d_I x = 0``. On the torus the symmetrized letter
multisets give one closed class per monomial u^a of C pi_1 / J^{s+1}, and the
pairing between the two is invertible, so nothing is missing from this space
(checked by :func:`pairing_matrix`, not assumed).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .chen import integrate_path, PathWord
from .exact import ExactMatrix, GQ, ONE, ZERO, GaussianRational, Subspace
from .group_algebra import (GroupAlgebraElement, j_power, monomials, to_group_elements)
from .torus import Letter, OneForm, Form, position_name, wedge_monomials


class BarError(ValueError):
    pass


def _word_text(word: tuple, g: int) -> str:
    if not word:
        return "1"
    return "[" + "|".join("^".join(position_name(p, g) for p in m) for m in word) + "]"


class BarElement:
    """Finite linear combination of bar words over Q(i)."""

    __slots__ = ("g", "terms")

    def __init__(self, g: int, terms: Mapping[tuple, GaussianRational] = ()):
        self.g = g
        clean: dict[tuple, GaussianRational] = {}
        for w, c in dict(terms).items():
            w = tuple(tuple(m) for m in w)
            c = GQ.coerce(c)
            if c:
                clean[w] = clean.get(w, ZERO) + c
        self.terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def word(cls, g: int, letters: Iterable, coeff=ONE) -> "BarElement":
        """Multilinear expansion of ``coeff * [l_1|...|l_s]``.

        Letters may be basis positions, Letters, OneForms, or Forms.
        """
        factors = []
        for x in letters:
            if isinstance(x, Form):
                factors.append(list(x.coeffs.items()))
            elif isinstance(x, OneForm):
                factors.append([((p,), c) for p, c in x.terms()])
            elif isinstance(x, Letter):
                factors.append([((x.position(g),), ONE)])
            else:
                factors.append([((int(x),), ONE)])
        out: dict[tuple, GaussianRational] = {}
        coeff = GQ.coerce(coeff)
        for choice in product(*factors):
            c = coeff
            for _, k in choice:
                c = c * k
            w = tuple(m for m, _ in choice)
            out[w] = out.get(w, ZERO) + c
        return cls(g, out)

    @classmethod
    def constant(cls, g: int, c=ONE) -> "BarElement":
        return cls(g, {(): c})

    @classmethod
    def zero(cls, g: int) -> "BarElement":
        return cls(g)

    def _check(self, other):
        if self.g != other.g:
            raise BarError(f"bar elements over different tori (g={self.g} vs g={other.g})")

    def __add__(self, other: "BarElement") -> "BarElement":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return BarElement(self.g, out)

    def __neg__(self):
        return BarElement(self.g, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BarElement":
        c = GQ.coerce(c)
        return BarElement(self.g, {w: c * v for w, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def pure(self) -> bool:
        return all(len(m) == 1 for w in self.terms for m in w)

    @property
    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, BarElement):
            return NotImplemented
        return self.g == other.g and self.terms == other.terms

    def __hash__(self):
        return hash((self.g, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        from .torus import _join_terms
        items = sorted(self.terms.items(), key=lambda wc: (len(wc[0]), wc[0]))
        return _join_terms((c, _word_text(w, self.g)) for w, c in items)

    def __repr__(self):
        return f"BarElement(g={self.g}, {self})"


# differentials --------------------------------------------------------------

def combinatorial_differential(e: BarElement) -> BarElement:
    """d_C on words of arbitrary-degree slots.

    d_C[w_1|...|w_s] = sum_i (-1)^{i+1} [Jw_1|...|Jw_{i-1}|Jw_i ^ w_{i+1}|w_{i+2}|...|w_s]
    with J(w) = (-1)^{deg w} w.
    """
    out: dict[tuple, GaussianRational] = {}
    for w, c in e.terms.items():
        j_sign = 1
        for i in range(len(w) - 1):
            # i is 0-based, so the displayed sign (-1)^{(i+1)+1} is (-1)^i
            j_sign *= -1 if len(w[i]) & 1 else 1
            merged = wedge_monomials(w[i], w[i + 1])
            if merged is None:
                continue
            wsign, m = merged
            sign = (-1 if i & 1 else 1) * j_sign * wsign
            nw = w[:i] + (m,) + w[i + 2:]
            out[nw] = out.get(nw, ZERO) + (c if sign > 0 else -c)
    return BarElement(e.g, out)


def d_C(e: BarElement) -> BarElement:
    """Combinatorial differential on pure-letter elements."""
    if not e.pure:
        raise BarError("d_C expects pure 1-form letters; use combinatorial_differential "
                       "for words with higher-degree slots")
    return combinatorial_differential(e)


def d_I(e: BarElement) -> BarElement:
    """Internal differential: applies d letterwise, which kills every constant form."""
    # every slot is a constant-coefficient form by construction, so d(slot) = 0
    for w in e.terms:
        for m in w:
            if not all(0 <= p < 2 * e.g for p in m):
                raise BarError(f"slot {m} is not a constant form on the torus g={e.g}")
    return BarElement.zero(e.g)


def symmetrize(letters: Sequence, g: int) -> BarElement:
    """Sum of all distinct orderings of a letter multiset, each with coefficient 1."""
    pos = []
    for x in letters:
        if isinstance(x, Letter):
            pos.append(x.position(g))
        elif isinstance(x, int):
            pos.append(x)
        else:
            raise BarError("symmetrize expects pure letters")
    words = {tuple((p,) for p in perm) for perm in permutations(pos)}
    return BarElement(g, {w: ONE for w in words})


def bidegree(multiset: Sequence[int], g: int) -> tuple[int, int]:
    hol = sum(1 for p in multiset if p < g)
    return hol, len(multiset) - hol


# invariant classes ----------------------------------------------------------

def class_multiset(alpha: Sequence[int]) -> tuple[int, ...]:
    """Letter multiset (sorted positions) attached to an exponent vector."""
    return tuple(p for p, e in enumerate(alpha) for _ in range(e))


@lru_cache(maxsize=None)
def invariant_space(g: int, s: int) -> tuple[BarElement, ...]:
    """Symmetrized classes, one per letter multiset of size <= s.

    The k-th class corresponds to the k-th monomial of ``monomials(g, s)``.
    """
    return tuple(symmetrize(class_multiset(alpha), g) for alpha in monomials(g, s))


@lru_cache(maxsize=None)
def _word_integral(word: tuple, vector: tuple) -> GaussianRational:
    g = len(vector) // 2
    forms = [OneForm.basis(g, m[0]) for m in word]
    return integrate_path(forms, PathWord.from_vector(vector), g)


def integrate_bar(e: BarElement, c: GroupAlgebraElement) -> GaussianRational:
    """Evaluate a pure-letter bar element on an element of C pi_1 / J^{s+1}."""
    if e.g != c.g:
        raise BarError("bar element and group algebra element live over different tori")
    if not e.pure:
        raise BarError("only 1-form words can be integrated")
    if e.max_length > c.s:
        raise BarError(f"length {e.max_length} functional is not defined modulo J^{c.s + 1}")
    combo = to_group_elements(c)
    acc = ZERO
    for w, coeff in e.terms.items():
        for vec, k in combo.items():
            val = _word_integral(w, vec) if w else ONE
            if val:
                acc = acc + coeff * k * val
    return acc


@lru_cache(maxsize=None)
def pairing_matrix(g: int, s: int) -> ExactMatrix:
    """Rows: invariant classes; columns: monomials u^a; entries: integrals."""
    classes = invariant_space(g, s)
    mons = monomials(g, s)
    rows = []
    for cls in classes:
        rows.append([integrate_bar(cls, GroupAlgebraElement(g, s, {m: ONE})) for m in mons])
    return ExactMatrix.from_rows(rows)


# filtrations ----------------------------------------------------------------

@dataclass(frozen=True)
class FiltrationReport:
    label: str          # "F", "Fbar" or "W"
    level: int
    space: Subspace
    coordinates: str    # "classes" or "group"
    g: int
    s: int

    @property
    def dim(self) -> int:
        return self.space.dim


def hodge_filtration(g: int, s: int, p: int, conjugate: bool = False) -> FiltrationReport:
    """F^p (or Fbar^p) of H^0(B_s): classes with at least p dz's (or dzbar's)."""
    idx = []
    for k, alpha in enumerate(monomials(g, s)):
        hol, anti = bidegree(class_multiset(alpha), g)
        if (anti if conjugate else hol) >= p:
            idx.append(k)
    n = len(monomials(g, s))
    return FiltrationReport("Fbar" if conjugate else "F", p, Subspace.coordinate(n, idx),
                            "classes", g, s)


def weight_filtration(g: int, s: int, l: int) -> FiltrationReport:
    """W_l of H^0(B_s): classes represented by words of length <= l."""
    mons = monomials(g, s)
    idx = [k for k, alpha in enumerate(mons) if sum(alpha) <= l]
    return FiltrationReport("W", l, Subspace.coordinate(len(mons), idx), "classes", g, s)


def dual_filtration(report: FiltrationReport, pairing: ExactMatrix | None = None) -> Subspace:
    """Elements of C pi_1 / J^{s+1} killed by every functional in the report's space."""
    if report.coordinates != "classes":
        raise BarError("dual_filtration expects a filtration step of H^0(B_s)")
    if pairing is None:
        pairing = pairing_matrix(report.g, report.s)
    return report.space.annihilator(pairing)


def group_hodge_filtration(g: int, s: int, q: int, conjugate: bool = False) -> FiltrationReport:
    """F^q (or Fbar^q) on C pi_1 / J^{s+1}: annihilator of F^{1-q} H^0(B_s)."""
    space = dual_filtration(hodge_filtration(g, s, 1 - q, conjugate))
    return FiltrationReport("Fbar" if conjugate else "F", q, space, "group", g, s)


def group_weight_filtration(g: int, s: int, m: int) -> FiltrationReport:
    """W_m on C pi_1 / J^{s+1}: annihilator of W_{-1-m} H^0(B_s)."""
    space = dual_filtration(weight_filtration(g, s, -1 - m))
    return FiltrationReport("W", m, space, "group", g, s)


@lru_cache(maxsize=None)
def ideal_I(g: int, s: int, conjugate: bool = False) -> Subspace:
    """I = sum_{k=1..s} J^k cap F^{1-k}; with ``conjugate`` the analogous Ibar."""
    n = len(monomials(g, s))
    total = Subspace.zero(n)
    for k in range(1, s + 1):
        step = group_hodge_filtration(g, s, 1 - k, conjugate).space
        total = total + j_power(k, s, g).intersect(step)
    return total


def ideal_elements(g: int, s: int, conjugate: bool = False) -> list[GroupAlgebraElement]:
    return [GroupAlgebraElement.from_vector(g, s, v) for v in ideal_I(g, s, conjugate).basis]
