"""The truncated group algebra C[Z^{2g}] / J^{s+1}.

With u_j = g_j - 1 for the 2g standard loops a_1..a_g, b_1..b_g the quotient
is the truncated polynomial ring C[u_1..u_{2g}] / (degree > s), and the
augmentation ideal J is spanned by the monomials of positive degree.

Monomials are exponent tuples of length 2g. Their fixed order (by degree,
then lexicographic in the sorted variable multiset) is the coordinate
system of every downstream filtration computation.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Mapping, Sequence

from .exact import GQ, ONE, ZERO, GaussianRational, Subspace
from .torus import _join_terms, generator_names


@lru_cache(maxsize=None)
def monomials(g: int, s: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree <= s in 2g variables."""
    n = 2 * g
    out = []
    for d in range(s + 1):
        for combo in combinations_with_replacement(range(n), d):
            exps = [0] * n
            for v in combo:
                exps[v] += 1
            out.append(tuple(exps))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(g: int, s: int) -> dict[tuple[int, ...], int]:
    return {m: k for k, m in enumerate(monomials(g, s))}


def algebra_dimension(g: int, s: int) -> int:
    return comb(2 * g + s, s)


def monomial_name(exps: Sequence[int], g: int) -> str:
    names = generator_names(g)
    parts = []
    for v, e in enumerate(exps):
        if e == 1:
            parts.append(f"u_{names[v]}")
        elif e > 1:
            parts.append(f"u_{names[v]}^{e}")
    return " ".join(parts) or "1"


class GroupAlgebraElement:
    """Element of C pi_1 / J^{s+1} in the basis of u-monomials."""

    __slots__ = ("g", "s", "coeffs")

    def __init__(self, g: int, s: int, coeffs: Mapping[tuple, GaussianRational] = ()):
        if g < 1 or s < 0:
            raise ValueError("need g >= 1 and s >= 0")
        self.g = g
        self.s = s
        clean = {}
        for m, c in dict(coeffs).items():
            m = tuple(m)
            if len(m) != 2 * g or any(e < 0 for e in m):
                raise ValueError(f"bad exponent vector {m}")
            c = GQ.coerce(c)
            if c and sum(m) <= s:
                clean[m] = clean.get(m, ZERO) + c
        self.coeffs = {m: c for m, c in clean.items() if c}

    @classmethod
    def one(cls, g: int, s: int) -> "GroupAlgebraElement":
        return cls(g, s, {(0,) * (2 * g): ONE})

    @classmethod
    def zero(cls, g: int, s: int) -> "GroupAlgebraElement":
        return cls(g, s)

    @classmethod
    def u(cls, g: int, s: int, gen: int) -> "GroupAlgebraElement":
        """u_gen = g_gen - 1, generators numbered 1..2g (a_1..a_g, b_1..b_g)."""
        if not 1 <= gen <= 2 * g:
            raise IndexError(f"generator {gen} out of range 1..{2 * g}")
        e = [0] * (2 * g)
        e[gen - 1] = 1
        return cls(g, s, {tuple(e): ONE})

    @classmethod
    def from_vector(cls, g: int, s: int, vec: Sequence) -> "GroupAlgebraElement":
        mons = monomials(g, s)
        if len(vec) != len(mons):
            raise ValueError("coordinate vector has the wrong length")
        return cls(g, s, {m: c for m, c in zip(mons, vec)})

    def vector(self) -> list[GaussianRational]:
        idx = monomial_index(self.g, self.s)
        out = [ZERO] * len(idx)
        for m, c in self.coeffs.items():
            out[idx[m]] = c
        return out

    def _check(self, other: "GroupAlgebraElement"):
        if (self.g, self.s) != (other.g, other.s):
            raise ValueError(f"truncation mismatch: (g={self.g}, s={self.s}) vs "
                             f"(g={other.g}, s={other.s})")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, ZERO) + c
        return GroupAlgebraElement(self.g, self.s, out)

    def __neg__(self):
        return GroupAlgebraElement(self.g, self.s, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GroupAlgebraElement":
        c = GQ.coerce(c)
        return GroupAlgebraElement(self.g, self.s, {m: c * v for m, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, n: int):
        result = GroupAlgebraElement.one(self.g, self.s)
        for _ in range(n):
            result = result * self
        return result

    def degree_part(self, d: int) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.g, self.s,
                                   {m: c for m, c in self.coeffs.items() if sum(m) == d})

    @property
    def order(self) -> int:
        """Smallest degree present (s+1 for the zero element): x lies in J^order."""
        return min((sum(m) for m in self.coeffs), default=self.s + 1)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return (self.g, self.s, self.coeffs) == (other.g, other.s, other.coeffs)

    def __hash__(self):
        return hash((self.g, self.s, frozenset(self.coeffs.items())))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"GroupAlgebraElement(g={self.g}, s={self.s}, {self})"


def format_element(x: GroupAlgebraElement) -> str:
    idx = monomial_index(x.g, x.s)
    items = sorted(x.coeffs.items(), key=lambda mc: idx[mc[0]])
    return _join_terms((c, monomial_name(m, x.g)) for m, c in items)


def format_vector(vec: Sequence, g: int, s: int) -> str:
    return format_element(GroupAlgebraElement.from_vector(g, s, vec))


def multiply(x: GroupAlgebraElement, y: GroupAlgebraElement) -> GroupAlgebraElement:
    x._check(y)
    s = x.s
    out: dict[tuple, GaussianRational] = {}
    for m1, c1 in x.coeffs.items():
        d1 = sum(m1)
        for m2, c2 in y.coeffs.items():
            if d1 + sum(m2) > s:
                continue
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, ZERO) + c1 * c2
    return GroupAlgebraElement(x.g, s, out)


def augmentation(x: GroupAlgebraElement) -> GaussianRational:
    return x.coeffs.get((0,) * (2 * x.g), ZERO)


def _power_of_generator(g: int, s: int, gen: int, n: int) -> GroupAlgebraElement:
    # (1 + u)^n = sum_k binom(n, k) u^k, generalized binomial for n < 0
    out = {}
    coeff = 1
    for k in range(s + 1):
        if k:
            coeff = coeff * (n - k + 1) // k
        if coeff == 0:
            break
        e = [0] * (2 * g)
        e[gen - 1] = k
        out[tuple(e)] = GQ(coeff)
    return GroupAlgebraElement(g, s, out)


def embed(path, s: int, g: int) -> GroupAlgebraElement:
    """Image of a loop in C pi_1 / J^{s+1}: letters multiplied in order.

    ``path`` is a PathWord or any iterable of (generator, exponent) pairs.
    g_j maps to 1 + u_j and g_j^{-1} to the truncated series 1 - u_j + u_j^2 - ...
    """
    letters = path.letters if hasattr(path, "letters") else tuple(path)
    result = GroupAlgebraElement.one(g, s)
    for gen, exp in letters:
        if not 1 <= gen <= 2 * g:
            raise IndexError(f"generator {gen} out of range for g={g}")
        if exp == 1:
            factor = GroupAlgebraElement.one(g, s) + GroupAlgebraElement.u(g, s, gen)
        elif exp == -1:
            u = GroupAlgebraElement.u(g, s, gen)
            factor = GroupAlgebraElement(g, s)
            term = GroupAlgebraElement.one(g, s)
            for _ in range(s + 1):
                factor = factor + term
                term = -(term * u)
        else:
            factor = _power_of_generator(g, s, gen, exp)
        result = multiply(result, factor)
    return result


def embed_vector(vector: Sequence[int], s: int, g: int) -> GroupAlgebraElement:
    """Image of the group element with the given lattice coordinates."""
    result = GroupAlgebraElement.one(g, s)
    for gen, n in enumerate(vector, start=1):
        if n:
            result = multiply(result, _power_of_generator(g, s, gen, n))
    return result


def j_power(k: int, s: int, g: int) -> Subspace:
    """J^k inside C pi_1 / J^{s+1}: the span of monomials of degree >= k."""
    if not 0 <= k <= s + 1:
        raise ValueError(f"J power {k} out of range 0..{s + 1}")
    mons = monomials(g, s)
    return Subspace.coordinate(len(mons), [i for i, m in enumerate(mons) if sum(m) >= k])


def j_filtration(s: int, g: int) -> list[Subspace]:
    return [j_power(k, s, g) for k in range(s + 2)]


def to_group_elements(x: GroupAlgebraElement) -> dict[tuple[int, ...], GaussianRational]:
    """Rewrite x as a finite combination of group elements (lattice vectors).

    u^a = prod_j (g_j - 1)^{a_j} = sum_{b <= a} prod_j binom(a_j, b_j) (-1)^{a_j - b_j} g^b.
    """
    out: dict[tuple[int, ...], GaussianRational] = {}
    for alpha, c in x.coeffs.items():
        for beta in product(*(range(a + 1) for a in alpha)):
            k = 1
            for a, b in zip(alpha, beta):
                k *= comb(a, b) * (-1) ** (a - b)
            out[beta] = out.get(beta, ZERO) + c * k
    return {v: c for v, c in out.items() if c}


def parse_element(text: str, g: int, s: int) -> GroupAlgebraElement:
    """Parse the ``i u_a1 - u_b1^2``-style report syntax back into an element."""
    import re
    from .exact import parse_scalar

    names = {name: k for k, name in enumerate(generator_names(g))}
    text = text.strip()
    if text == "0":
        return GroupAlgebraElement.zero(g, s)
    term_re = re.compile(r"\s*([+-])?\s*(\([^()]*\)|\d+(?:/\d+)?i?|i)?\s*((?:u_[ab]\d+(?:\^\d+)?\s*)+|1)?")
    pos = 0
    out: dict[tuple, GaussianRational] = {}
    first = True
    while pos < len(text):
        m = term_re.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse group algebra element at column {pos + 1}: {text!r}")
        sign, scalar, mono = m.groups()
        if not first and sign is None:
            raise ValueError(f"missing sign at column {pos + 1}")
        if scalar is None and mono is None:
            raise ValueError(f"empty term at column {pos + 1}")
        coeff = parse_scalar(scalar) if scalar else ONE
        if sign == "-":
            coeff = -coeff
        exps = [0] * (2 * g)
        if mono and mono.strip() != "1":
            for factor in mono.split():
                name, _, power = factor[2:].partition("^")
                if name not in names:
                    raise ValueError(f"unknown generator {name!r}")
                exps[names[name]] += int(power or 1)
        e = tuple(exps)
        out[e] = out.get(e, ZERO) + coeff
        pos = m.end()
        first = False
    return GroupAlgebraElement(g, s, out)
