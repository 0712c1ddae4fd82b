"""Constant-coefficient forms on the square torus X = C^g / (Z^g + iZ^g).

On this torus every harmonic form has constant coefficients in the basis
dz_1..dz_g, dzbar_1..dzbar_g, and every constant form is harmonic, closed,
and both d- and dbar-closed. This is the modelling reduction the rest of
the package relies on: conditions of the form ``dA = 0``, ``dbar A = 0`` hold
identically and flatness of a nilpotent connection becomes ``A ^ A = 0``.

Basis 1-forms are addressed by a *position* in ``range(2g)``: positions
``0..g-1`` are dz_1..dz_g and ``g..2g-1`` are dzbar_1..dzbar_g. A basis k-form
is an increasing tuple of positions, so 2-forms are indexed lexicographically
with holomorphic letters first.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exact import GQ, I, ONE, ZERO, GaussianRational, format_scalar, parse_scalar

HOL = "dz"
ANTIHOL = "dzbar"


@dataclass(frozen=True, order=True)
class Letter:
    """A basis 1-form dz_index or dzbar_index (index is 1-based)."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in (HOL, ANTIHOL):
            raise ValueError(f"unknown letter kind {self.kind!r}")
        if self.index < 1:
            raise ValueError("letter index must be >= 1")

    @property
    def holomorphic(self) -> bool:
        return self.kind == HOL

    def position(self, g: int) -> int:
        if self.index > g:
            raise ValueError(f"{self} out of range for g={g}")
        return self.index - 1 if self.kind == HOL else g + self.index - 1

    @classmethod
    def from_position(cls, pos: int, g: int) -> "Letter":
        if not 0 <= pos < 2 * g:
            raise ValueError(f"position {pos} out of range for g={g}")
        return cls(HOL, pos + 1) if pos < g else cls(ANTIHOL, pos - g + 1)

    def __str__(self):
        return f"{self.kind}{self.index}"


def position_name(pos: int, g: int) -> str:
    return str(Letter.from_position(pos, g))


def is_holomorphic_position(pos: int, g: int) -> bool:
    return pos < g


class TorusSpace:
    """The square torus of complex dimension g."""

    def __init__(self, g: int):
        if g < 1:
            raise ValueError("complex dimension must be >= 1")
        self.g = g

    @property
    def betti_number(self) -> int:
        return 2 * self.g

    def letters(self) -> list[Letter]:
        return [Letter.from_position(p, self.g) for p in range(2 * self.g)]

    def generator_names(self) -> list[str]:
        return generator_names(self.g)

    def __repr__(self):
        return f"TorusSpace(g={self.g})"


def generator_names(g: int) -> list[str]:
    return [f"a{j}" for j in range(1, g + 1)] + [f"b{j}" for j in range(1, g + 1)]


@dataclass(frozen=True)
class OneForm:
    """Constant 1-form sum hol[j] dz_{j+1} + antihol[j] dzbar_{j+1}."""

    hol: tuple
    antihol: tuple

    def __post_init__(self):
        if len(self.hol) != len(self.antihol) or not self.hol:
            raise ValueError("hol and antihol must have the same positive length g")
        object.__setattr__(self, "hol", tuple(GQ.coerce(c) for c in self.hol))
        object.__setattr__(self, "antihol", tuple(GQ.coerce(c) for c in self.antihol))

    @property
    def g(self) -> int:
        return len(self.hol)

    @classmethod
    def zero(cls, g: int) -> "OneForm":
        return cls((ZERO,) * g, (ZERO,) * g)

    @classmethod
    def basis(cls, g: int, pos: int) -> "OneForm":
        coeffs = [ZERO] * (2 * g)
        coeffs[pos] = ONE
        return cls(tuple(coeffs[:g]), tuple(coeffs[g:]))

    @classmethod
    def from_letter(cls, letter: Letter, g: int) -> "OneForm":
        return cls.basis(g, letter.position(g))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence) -> "OneForm":
        g = len(coeffs) // 2
        return cls(tuple(coeffs[:g]), tuple(coeffs[g:]))

    @property
    def coefficients(self) -> tuple:
        """All 2g coefficients in position order."""
        return self.hol + self.antihol

    def terms(self) -> list[tuple[int, GaussianRational]]:
        return [(p, c) for p, c in enumerate(self.coefficients) if c]

    def _check(self, other: "OneForm"):
        if self.g != other.g:
            raise ValueError(f"forms on tori of different dimension ({self.g} vs {other.g})")

    def __add__(self, other: "OneForm") -> "OneForm":
        self._check(other)
        return OneForm(tuple(a + b for a, b in zip(self.hol, other.hol)),
                       tuple(a + b for a, b in zip(self.antihol, other.antihol)))

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + (-other)

    def __neg__(self) -> "OneForm":
        return OneForm(tuple(-a for a in self.hol), tuple(-a for a in self.antihol))

    def scale(self, c) -> "OneForm":
        c = GQ.coerce(c)
        return OneForm(tuple(c * a for a in self.hol), tuple(c * a for a in self.antihol))

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not any(self.hol) and not any(self.antihol)

    @property
    def is_type_10(self) -> bool:
        return not any(self.antihol)

    @property
    def is_type_01(self) -> bool:
        return not any(self.hol)

    def value_on(self, vector: Sequence[int]) -> GaussianRational:
        """Integral of the form along the straight segment 0 -> vector.

        ``vector`` has 2g integer entries: multiples of a_1..a_g, b_1..b_g.
        """
        g = self.g
        if len(vector) != 2 * g:
            raise ValueError("lattice vector must have 2g entries")
        acc = ZERO
        for j in range(g):
            x, y = vector[j], vector[g + j]
            if x:
                acc = acc + (self.hol[j] + self.antihol[j]) * x
            if y:
                acc = acc + I * (self.hol[j] - self.antihol[j]) * y
        return acc

    def __str__(self):
        return format_form(self)


def period(f: OneForm, gen: int) -> GaussianRational:
    """Integral of f over the generator loop ``gen`` (1..g: a_j, g+1..2g: b_j)."""
    g = f.g
    if not 1 <= gen <= 2 * g:
        raise IndexError(f"generator index {gen} out of range 1..{2 * g}")
    v = [0] * (2 * g)
    v[gen - 1] = 1
    return f.value_on(v)


def period_matrix(g: int):
    """Matrix whose (letter position, generator) entry is the period."""
    from .exact import ExactMatrix
    return ExactMatrix.from_rows([[period(OneForm.basis(g, p), k) for k in range(1, 2 * g + 1)]
                                  for p in range(2 * g)])


def type_split(f: OneForm) -> tuple[OneForm, OneForm]:
    zero = (ZERO,) * f.g
    return OneForm(f.hol, zero), OneForm(zero, f.antihol)


# higher degree forms -------------------------------------------------------

def wedge_monomials(m1: tuple, m2: tuple) -> tuple[int, tuple] | None:
    """Wedge two basis monomials (increasing position tuples).

    Returns ``(sign, merged)`` or ``None`` when a letter repeats.
    """
    if set(m1) & set(m2):
        return None
    # sign = parity of the number of pairs (a in m1, b in m2) with a > b
    inversions = sum(1 for a in m1 for b in m2 if a > b)
    return (-1 if inversions & 1 else 1), tuple(sorted(m1 + m2))


class Form:
    """Constant-coefficient differential form of fixed degree."""

    __slots__ = ("g", "degree", "coeffs")

    def __init__(self, g: int, degree: int, coeffs: Mapping[tuple, GaussianRational] = ()):
        self.g = g
        self.degree = degree
        clean = {}
        for mono, c in dict(coeffs).items():
            mono = tuple(mono)
            if len(mono) != degree or list(mono) != sorted(set(mono)):
                raise ValueError(f"bad basis monomial {mono} for degree {degree}")
            if mono and not 0 <= mono[-1] < 2 * g:
                raise ValueError(f"monomial {mono} out of range for g={g}")
            c = GQ.coerce(c)
            if c:
                clean[mono] = c
        self.coeffs = clean

    @classmethod
    def from_one_form(cls, f: OneForm) -> "Form":
        return cls(f.g, 1, {(p,): c for p, c in f.terms()})

    @classmethod
    def basis_index(cls, g: int, degree: int) -> list[tuple]:
        return list(combinations(range(2 * g), degree))

    def wedge(self, other: "Form") -> "Form":
        if self.g != other.g:
            raise ValueError(f"forms on tori of different dimension ({self.g} vs {other.g})")
        out: dict[tuple, GaussianRational] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                w = wedge_monomials(m1, m2)
                if w is None:
                    continue
                sign, m = w
                out[m] = out.get(m, ZERO) + (c1 * c2 if sign > 0 else -(c1 * c2))
        return Form(self.g, self.degree + other.degree, out)

    def __add__(self, other: "Form") -> "Form":
        if (self.g, self.degree) != (other.g, other.degree):
            raise ValueError("adding forms of different shape")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, ZERO) + c
        return Form(self.g, self.degree, out)

    def __neg__(self) -> "Form":
        return Form(self.g, self.degree, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        c = GQ.coerce(c)
        return Form(self.g, self.degree, {m: c * v for m, v in self.coeffs.items()})

    def coefficient(self, *letters) -> GaussianRational:
        """Coefficient of a basis form given by letters or positions (any order)."""
        pos = [x.position(self.g) if isinstance(x, Letter) else x for x in letters]
        w = Form(self.g, 0, {(): ONE})
        for p in pos:
            w = w.wedge(Form(self.g, 1, {(p,): ONE}))
        if not w.coeffs:
            return ZERO
        (mono, sign), = w.coeffs.items()
        return self.coeffs.get(mono, ZERO) * sign

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self.g, self.degree, self.coeffs) == (other.g, other.degree, other.coeffs)

    def __hash__(self):
        return hash((self.g, self.degree, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"Form(g={self.g}, {self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs):
            name = "^".join(position_name(p, self.g) for p in m) or "1"
            parts.append((self.coeffs[m], name))
        return _join_terms(parts)


HarmonicOneForm = OneForm
HarmonicTwoForm = Form


def wedge(a: OneForm, b: OneForm) -> Form:
    """Wedge product of two 1-forms, a 2-form in the normalized basis."""
    if a.g != b.g:
        raise ValueError(f"forms on tori of different dimension ({a.g} vs {b.g})")
    return Form.from_one_form(a).wedge(Form.from_one_form(b))


# text grammar --------------------------------------------------------------

def _coefficient_text(c: GaussianRational) -> tuple[bool, str]:
    """(negative, magnitude) such that the term reads ``-magnitude basis``."""
    if c.re and c.im:
        return False, f"({format_scalar(c)})"
    negative = (c.re < 0) if c.re else (c.im < 0)
    mag = format_scalar(-c if negative else c)
    return negative, "" if mag == "1" else mag


def _join_terms(parts: Iterable[tuple[GaussianRational, str]]) -> str:
    out = []
    for k, (c, name) in enumerate(parts):
        neg, mag = _coefficient_text(c)
        body = f"{mag} {name}" if mag else name
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


def format_form(f: OneForm) -> str:
    return _join_terms((c, position_name(p, f.g)) for p, c in f.terms())


class FormParseError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.message = message
        self.column = column


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<paren>\([^()]*\))
  | (?P<basis>dzbar\d+|dz\d+)
  | (?P<num>\d+(?:/\d+)?i?)
  | (?P<imag>i)
  | (?P<sign>[+-])
  | (?P<star>\*)
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormParseError(f"unexpected character {text[pos]!r}", pos + 1)
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return toks


def parse_form(text: str, g: int | None = None) -> OneForm:
    """Parse ``dz1 + (2-3i) dzbar2``-style text into a OneForm.

    With ``g=None`` the dimension is the largest index that occurs (at least 1).
    """
    toks = _tokenize(text)
    if not toks:
        raise FormParseError("empty form", 1)
    if len(toks) == 1 and toks[0][0] == "num" and toks[0][1] == "0":
        return OneForm.zero(g or 1)
    terms: list[tuple[Letter, GaussianRational, int]] = []
    k = 0
    first = True
    while k < len(toks):
        sign = 1
        kind, val, col = toks[k]
        if kind == "sign":
            sign = -1 if val == "-" else 1
            k += 1
        elif not first:
            raise FormParseError(f"expected '+' or '-', found {val!r}", col)
        if k >= len(toks):
            raise FormParseError("dangling sign", col)
        kind, val, col = toks[k]
        coeff = ONE
        if kind in ("paren", "num", "imag"):
            try:
                coeff = parse_scalar(val)
            except ValueError:
                raise FormParseError(f"malformed scalar {val!r}", col) from None
            k += 1
            if k < len(toks) and toks[k][0] == "star":
                k += 1
            if k >= len(toks):
                raise FormParseError("scalar without basis form", col)
            kind, val, col = toks[k]
        if kind != "basis":
            raise FormParseError(f"expected dz<j> or dzbar<j>, found {val!r}", col)
        letter_kind = ANTIHOL if val.startswith(ANTIHOL) else HOL
        index = int(val[len(letter_kind):])
        if index < 1:
            raise FormParseError(f"index must be >= 1 in {val!r}", col)
        terms.append((Letter(letter_kind, index), coeff * sign, col))
        k += 1
        first = False
    max_index = max(t[0].index for t in terms)
    if g is None:
        g = max_index
    for letter, _, col in terms:
        if letter.index > g:
            raise FormParseError(f"{letter} out of range for g={g}", col)
    coeffs = [ZERO] * (2 * g)
    for letter, c, _ in terms:
        p = letter.position(g)
        coeffs[p] = coeffs[p] + c
    return OneForm.from_coefficients(coeffs)
