"""Exact arithmetic over the Gaussian rationals Q(i) and dense linear algebra.

Everything downstream (periods, iterated integrals, filtrations, monodromy)
is computed with :class:`GaussianRational` scalars, so no rounding ever
enters a comparison.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

# Scalars are stored as GMP rationals; Fraction and int inputs are accepted.
_Q = type(mpq())
_RATIONAL_TYPES = (int, Fraction, _Q)


class GaussianRational:
    """A complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is _Q else mpq(re)
        self.im = im if type(im) is _Q else mpq(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, _RATIONAL_TYPES):
            return cls(x)
        if isinstance(x, complex):
            raise TypeError("floating point complex numbers are not exact")
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if type(other) is not GaussianRational:
            if isinstance(other, _RATIONAL_TYPES):
                return GaussianRational(self.re + other, self.im)
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not GaussianRational:
            if isinstance(other, _RATIONAL_TYPES):
                return GaussianRational(self.re - other, self.im)
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if type(other) is not GaussianRational:
            if isinstance(other, _RATIONAL_TYPES):
                return GaussianRational(self.re * other, self.im * other)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            if not other:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussianRational(self.re / other, self.im / other)
        other = GaussianRational.coerce(other)
        if not other.im:
            return self / other.re
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(self.re / norm, -self.im / norm)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    # comparison ---------------------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if type(other) is GaussianRational:
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATIONAL_TYPES):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


GQ = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def gq_arith(x, y, op: str) -> GaussianRational:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two scalars."""
    x, y = GQ.coerce(x), GQ.coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


# textual form ------------------------------------------------------------

def _format_fraction(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(x: GaussianRational) -> str:
    """Render as ``p/q``, ``a+bi`` etc.; zero parts are omitted."""
    re_, im_ = x.re, x.im
    if not im_:
        return _format_fraction(re_)
    if im_ == 1:
        imag = "i"
    elif im_ == -1:
        imag = "-i"
    else:
        imag = _format_fraction(im_) + "i"
    if not re_:
        return imag
    sep = "" if imag.startswith("-") else "+"
    return f"{_format_fraction(re_)}{sep}{imag}"


_RATIONAL = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"""^\s*
    (?:
        (?P<re>[+-]?{_RATIONAL})
        (?:\s*(?P<isign>[+-])\s*(?P<im1>{_RATIONAL})?\s*i)?
      |
        (?P<sign2>[+-])?\s*(?P<im2>{_RATIONAL})?\s*i
    )\s*$""",
    re.VERBOSE,
)


class ScalarParseError(ValueError):
    pass


def parse_scalar(text: str) -> GaussianRational:
    """Inverse of :func:`format_scalar`; accepts optional outer parentheses."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    m = _SCALAR_RE.match(s)
    if not m:
        raise ScalarParseError(f"malformed scalar {text!r}")
    if m.group("re") is not None:
        re_ = Fraction(m.group("re"))
        im_ = Fraction(0)
        if m.group("isign"):
            im_ = Fraction(m.group("im1") or 1)
            if m.group("isign") == "-":
                im_ = -im_
        return GQ(re_, im_)
    im_ = Fraction(m.group("im2") or 1)
    if m.group("sign2") == "-":
        im_ = -im_
    return GQ(0, im_)


# matrices ----------------------------------------------------------------

class ExactMatrix:
    """Dense immutable matrix over Q(i), stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence):
        if len(entries) != rows * cols:
            raise ValueError("entries length must equal rows * cols")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(GQ.coerce(e) for e in entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, [e for r in rows for e in r])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, [ZERO] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[GaussianRational]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows,
                           [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return ExactMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "ExactMatrix":
        c = GQ.coerce(c)
        return ExactMatrix(self.rows, self.cols, [c * a for a in self.entries])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n, m, p = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            arow = a[i * m:(i + 1) * m]
            nz = [(k, x) for k, x in enumerate(arow) if x]
            for j in range(p):
                acc = ZERO
                for k, x in nz:
                    y = b[k * p + j]
                    if y:
                        acc = acc + x * y
                out.append(acc)
        return ExactMatrix(n, p, out)

    def apply(self, vec: Sequence) -> list[GaussianRational]:
        if len(vec) != self.cols:
            raise ValueError("vector length does not match column count")
        out = []
        for i in range(self.rows):
            acc = ZERO
            for x, y in zip(self.row(i), vec):
                if x and y:
                    acc = acc + x * y
            out.append(acc)
        return out

    def __pow__(self, n: int) -> "ExactMatrix":
        if self.rows != self.cols or n < 0:
            raise ValueError("power needs a square matrix and n >= 0")
        result = ExactMatrix.identity(self.rows)
        for _ in range(n):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return not any(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"ExactMatrix({self.rows}, {self.cols}, {format_matrix(self)!r})"

    def rank(self) -> int:
        return len(rref(self)[1])

    def determinant(self) -> GaussianRational:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        m = self.to_rows()
        n = self.rows
        det = ONE
        for c in range(n):
            p = next((r for r in range(c, n) if m[r][c]), None)
            if p is None:
                return ZERO
            if p != c:
                m[c], m[p] = m[p], m[c]
                det = -det
            piv = m[c][c]
            det = det * piv
            inv = piv.inverse()
            for r in range(c + 1, n):
                f = m[r][c]
                if f:
                    f = f * inv
                    m[r] = [x - f * y for x, y in zip(m[r], m[c])]
        return det


def format_matrix(m: ExactMatrix) -> str:
    return "\n".join("[" + ", ".join(format_scalar(x) for x in m.row(i)) + "]"
                     for i in range(m.rows))


def parse_matrix(text: str) -> ExactMatrix:
    rows = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not (line.startswith("[") and line.endswith("]")):
            raise ScalarParseError(f"malformed matrix row {line!r}")
        body = line[1:-1].strip()
        rows.append([parse_scalar(t) for t in body.split(",")] if body else [])
    return ExactMatrix.from_rows(rows)


# elimination -------------------------------------------------------------

def _rref_rows(rows: list[list[GaussianRational]], ncols: int):
    """In-place reduced row echelon form; returns (rows, pivots)."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((k for k in range(r, nrows) if rows[k][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != ONE:
            inv = piv.inverse()
            rows[r] = [x * inv if x else x for x in rows[r]]
        prow = rows[r]
        for k in range(nrows):
            if k != r:
                f = rows[k][c]
                if f:
                    rows[k] = [x - f * y if y else x for x, y in zip(rows[k], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    rows, pivots = _rref_rows(m.to_rows(), m.cols)
    return ExactMatrix(m.rows, m.cols, [x for row in rows for x in row]), pivots


def _kernel_vectors(rows: list[list], ncols: int) -> list[list[GaussianRational]]:
    red, pivots = _rref_rows([list(r) for r in rows], ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for row_idx, pc in enumerate(pivots):
            v[pc] = -red[row_idx][free]
        basis.append(v)
    return basis


def kernel(m: ExactMatrix) -> "Subspace":
    return Subspace(m.cols, _kernel_vectors(m.to_rows(), m.cols))


# subspaces ---------------------------------------------------------------

class Subspace:
    """A subspace of Q(i)^n stored by its reduced echelon basis.

    Two subspaces are equal exactly when their stored bases are equal.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        rows = [[GQ.coerce(x) for x in v] for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        red, pivots = _rref_rows(rows, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis = tuple(tuple(red[k]) for k in range(len(pivots)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, [])

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        return cls(n, [[ONE if i == j else ZERO for j in range(n)] for i in sorted(set(indices))])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(f"ambient dimension mismatch {self.ambient_dim} vs {other.ambient_dim}")

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        n = self.ambient_dim
        if not self.basis or not other.basis:
            return Subspace.zero(n)
        # x*A = y*B  <=>  (x, -y) in left kernel of [A; B]
        a, b = self.basis, other.basis
        cols = len(a) + len(b)
        system = [[a[k][j] for k in range(len(a))] + [-b[k][j] for k in range(len(b))]
                  for j in range(n)]
        vectors = []
        for sol in _kernel_vectors(system, cols):
            vec = [ZERO] * n
            for k, coeff in enumerate(sol[:len(a)]):
                if coeff:
                    vec = [x + coeff * y for x, y in zip(vec, a[k])]
            vectors.append(vec)
        return Subspace(n, vectors)

    __and__ = intersect

    def annihilator(self, pairing: ExactMatrix) -> "Subspace":
        """``{c : v^T P c = 0 for all v in self}`` where P is ``pairing``."""
        if pairing.rows != self.ambient_dim:
            raise ValueError(f"pairing has {pairing.rows} rows, subspace lives in dimension "
                             f"{self.ambient_dim}")
        if not self.basis:
            return Subspace.full(pairing.cols)
        functionals = ExactMatrix.from_rows(self.basis) @ pairing
        return kernel(functionals)

    def contains_vector(self, v: Sequence) -> bool:
        v = [GQ.coerce(x) for x in v]
        if len(v) != self.ambient_dim:
            raise ValueError("vector dimension mismatch")
        return Subspace(self.ambient_dim, self.basis + (tuple(v),)).dim == self.dim

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return (self + other).dim == other.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        vecs = "; ".join("(" + ", ".join(format_scalar(x) for x in v) + ")" for v in self.basis)
        return f"Subspace(dim={self.dim}/{self.ambient_dim}: {vecs})"


def subspace_ops(a: Subspace, b: Subspace | None = None, op: str = "sum",
                 pairing: ExactMatrix | None = None) -> Subspace:
    if op == "sum":
        return a + b
    if op == "intersect":
        return a.intersect(b)
    if op == "annihilator":
        if pairing is None:
            raise ValueError("annihilator needs a pairing matrix")
        return a.annihilator(pairing)
    raise ValueError(f"unknown subspace operation {op!r}")
