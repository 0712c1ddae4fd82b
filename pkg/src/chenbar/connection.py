"""Nilpotent flat connections d + A on the trivial bundle over the square torus.

A is strictly upper block triangular with constant 1-form entries. Constant
forms are harmonic, so the harmonic pair of the connection is (trivial bundle,
A) in the flat frame, the Higgs bundle is (trivial, dbar + A), and the
harmonic-bundle conditions collapse to A ^ A = 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bar import BarElement, combinatorial_differential, ideal_I
from .chen import PathWord, integrate_path
from .exact import GQ, ONE, ZERO, ExactMatrix, GaussianRational, Subspace
from .group_algebra import GroupAlgebraElement, monomials, to_group_elements
from .torus import Form, FormParseError, OneForm, format_form, parse_form, type_split


class NotFlatError(ValueError):
    pass


class Connection:
    """Connection matrix A with blocks r_1, ..., r_{s+1}.

    ``matrix`` is the full r x r matrix of OneForms; everything on or below
    the block diagonal must vanish.
    """

    __slots__ = ("g", "block_sizes", "matrix", "_offsets")

    def __init__(self, g: int, block_sizes: Sequence[int], matrix: Sequence[Sequence[OneForm]]):
        if g < 1:
            raise ValueError("g must be >= 1")
        block_sizes = tuple(int(b) for b in block_sizes)
        if not block_sizes or any(b < 1 for b in block_sizes):
            raise ValueError("block sizes must be positive")
        r = sum(block_sizes)
        rows = tuple(tuple(row) for row in matrix)
        if len(rows) != r or any(len(row) != r for row in rows):
            raise ValueError(f"matrix must be {r} x {r}")
        self.g = g
        self.block_sizes = block_sizes
        self.matrix = rows
        offs = [0]
        for b in block_sizes:
            offs.append(offs[-1] + b)
        self._offsets = tuple(offs)
        for a in range(r):
            for b in range(r):
                f = rows[a][b]
                if f.g != g:
                    raise ValueError(f"entry ({a + 1},{b + 1}) lives on a torus of dimension {f.g}")
                if not f.is_zero() and self.block_of(a) >= self.block_of(b):
                    raise ValueError(f"entry ({a + 1},{b + 1}) is not strictly above the block diagonal")

    @classmethod
    def from_blocks(cls, g: int, block_sizes: Sequence[int],
                    blocks: Mapping[tuple[int, int], Sequence[Sequence]]) -> "Connection":
        """Build from {(i, j): r_i x r_j matrix of forms}, block indices 1-based, i < j."""
        entries = {}
        for (i, j), mat in blocks.items():
            for row, line in enumerate(mat, start=1):
                for col, f in enumerate(line, start=1):
                    entries[(i, j, row, col)] = f
        return cls.from_entries(g, block_sizes, entries)

    @classmethod
    def from_entries(cls, g: int, block_sizes: Sequence[int],
                     entries: Mapping[tuple[int, int, int, int], OneForm]) -> "Connection":
        """Build from {(i, j, row, col): form}, all indices 1-based within blocks."""
        r = sum(block_sizes)
        offs = [0]
        for b in block_sizes:
            offs.append(offs[-1] + b)
        mat = [[OneForm.zero(g) for _ in range(r)] for _ in range(r)]
        nblocks = len(block_sizes)
        for (i, j, row, col), f in entries.items():
            if not (1 <= i <= nblocks and 1 <= j <= nblocks):
                raise ValueError(f"block index ({i},{j}) out of range 1..{nblocks}")
            if i >= j:
                raise ValueError(f"block ({i},{j}) is not strictly upper triangular")
            if not (1 <= row <= block_sizes[i - 1] and 1 <= col <= block_sizes[j - 1]):
                raise ValueError(f"position ({row},{col}) outside block ({i},{j})")
            if isinstance(f, str):
                f = parse_form(f, g)
            mat[offs[i - 1] + row - 1][offs[j - 1] + col - 1] = f
        return cls(g, block_sizes, mat)

    @classmethod
    def zero(cls, g: int, block_sizes: Sequence[int]) -> "Connection":
        return cls.from_entries(g, block_sizes, {})

    @property
    def rank(self) -> int:
        return self._offsets[-1]

    @property
    def s(self) -> int:
        """Nilpotency length: s + 1 blocks, so the monodromy factors through J^{s+1}."""
        return len(self.block_sizes) - 1

    def block_of(self, index: int) -> int:
        """0-based block containing the 0-based row/column ``index``."""
        for k in range(len(self.block_sizes)):
            if index < self._offsets[k + 1]:
                return k
        raise IndexError(index)

    def locate(self, a: int, b: int) -> tuple[int, int, int, int]:
        """1-based (block i, block j, row, col) of the global 0-based entry (a, b)."""
        i, j = self.block_of(a), self.block_of(b)
        return i + 1, j + 1, a - self._offsets[i] + 1, b - self._offsets[j] + 1

    def block(self, i: int, j: int) -> list[list[OneForm]]:
        oi, oj = self._offsets[i - 1], self._offsets[j - 1]
        return [[self.matrix[oi + row][oj + col] for col in range(self.block_sizes[j - 1])]
                for row in range(self.block_sizes[i - 1])]

    def nonzero_entries(self):
        for a, row in enumerate(self.matrix):
            for b, f in enumerate(row):
                if not f.is_zero():
                    yield a, b, f

    def map_entries(self, fn) -> "Connection":
        return Connection(self.g, self.block_sizes, [[fn(f) for f in row] for row in self.matrix])

    @property
    def is_type_10(self) -> bool:
        return all(f.is_type_10 for _, _, f in self.nonzero_entries())

    @property
    def is_type_01(self) -> bool:
        return all(f.is_type_01 for _, _, f in self.nonzero_entries())

    def period_matrix(self, vector: Sequence[int]) -> ExactMatrix:
        """Entrywise integral of A over the straight segment 0 -> vector."""
        r = self.rank
        return ExactMatrix(r, r, [f.value_on(vector) for row in self.matrix for f in row])

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return (self.g, self.block_sizes, self.matrix) == (other.g, other.block_sizes, other.matrix)

    def __hash__(self):
        return hash((self.g, self.block_sizes, self.matrix))

    def __repr__(self):
        return f"Connection(g={self.g}, blocks={self.block_sizes})"

    def __str__(self):
        return render_connection(self)


# flatness ---------------------------------------------------------------------

@dataclass(frozen=True)
class FlatnessVerdict:
    flat: bool
    entry: tuple[int, int, int, int] | None = None   # (block i, block j, row, col)
    value: Form | None = None

    def __bool__(self):
        return self.flat

    def describe(self) -> str:
        if self.flat:
            return "flat: A^A = 0"
        i, j, row, col = self.entry
        return f"not flat: (A^A) block ({i},{j}) entry ({row},{col}) = {self.value}"


def wedge_square(c: Connection) -> list[list[Form]]:
    """The matrix A ^ A of 2-forms."""
    r = c.rank
    one = [[Form.from_one_form(f) for f in row] for row in c.matrix]
    out = []
    for a in range(r):
        line = []
        for b in range(r):
            acc = Form(c.g, 2)
            for k in range(r):
                if one[a][k] and one[k][b]:
                    acc = acc + one[a][k].wedge(one[k][b])
            line.append(acc)
        out.append(line)
    return out


def check_flat(c: Connection) -> FlatnessVerdict:
    sq = wedge_square(c)
    for a in range(c.rank):
        for b in range(c.rank):
            if sq[a][b]:
                return FlatnessVerdict(False, c.locate(a, b), sq[a][b])
    return FlatnessVerdict(True)


def require_flat(c: Connection) -> None:
    verdict = check_flat(c)
    if not verdict.flat:
        raise NotFlatError(verdict.describe())


# Chen series ------------------------------------------------------------------

def series_terms(c: Connection) -> list[list[list[BarElement]]]:
    """Bar-level entries of A, A^2, ..., A^s (index l-1 holds A^l)."""
    r = c.rank
    g = c.g
    first = [[BarElement.word(g, [f]) if not f.is_zero() else BarElement.zero(g) for f in row]
             for row in c.matrix]
    terms = [first]
    for _ in range(1, c.s):
        prev = terms[-1]
        nxt = []
        for a in range(r):
            line = []
            for b in range(r):
                acc: dict[tuple, GaussianRational] = {}
                for k in range(r):
                    f = c.matrix[k][b]
                    if f.is_zero() or not prev[a][k]:
                        continue
                    for w, coeff in prev[a][k].terms.items():
                        for p, x in f.terms():
                            nw = w + ((p,),)
                            acc[nw] = acc.get(nw, ZERO) + coeff * x
                line.append(BarElement(g, acc))
            nxt.append(line)
        terms.append(nxt)
    return terms


def _chains(c: Connection):
    """All index chains a = k_0 < k_1 < ... < k_l = b through nonzero entries."""
    succ = {a: [(b, f) for b, f in enumerate(c.matrix[a]) if not f.is_zero()]
            for a in range(c.rank)}
    out = []

    def walk(start, current, forms):
        for b, f in succ[current]:
            chain = forms + (f,)
            out.append((start, b, chain))
            walk(start, b, chain)

    for a in range(c.rank):
        walk(a, a, ())
    return out


def monodromy(c: Connection, p: PathWord, *, check: bool = True) -> ExactMatrix:
    """rho(p) = E + integral_p A + integral_p AA + ... + integral_p A^s."""
    if check:
        require_flat(c)
    r = c.rank
    entries = [ONE if a == b else ZERO for a in range(r) for b in range(r)]
    for a, b, forms in _chains(c):
        val = integrate_path(forms, p, c.g)
        if val:
            entries[a * r + b] = entries[a * r + b] + val
    return ExactMatrix(r, r, entries)


def transport(c: Connection, p: PathWord) -> ExactMatrix:
    """Product of exp(A(v)) over the segments v of p (matrix form of the Chen series)."""
    r = c.rank
    result = ExactMatrix.identity(r)
    for v in p.segments(c.g):
        m = c.period_matrix(v)
        term = ExactMatrix.identity(r)
        step = ExactMatrix.identity(r)
        for k in range(1, c.s + 1):
            term = (term @ m).scale(GQ(1) / k)
            step = step + term
        result = result @ step
    return result


class TruncationTooSmall(ValueError):
    pass


def generator_images(c: Connection) -> list[ExactMatrix]:
    """rho(g_j) - E for the 2g generators, i.e. the images of u_1..u_{2g}."""
    ident = ExactMatrix.identity(c.rank)
    out = []
    for gen in range(1, 2 * c.g + 1):
        out.append(monodromy(c, PathWord(((gen, 1),)), check=False) - ident)
    return out


def monomial_images(c: Connection, s: int | None = None) -> dict[tuple, ExactMatrix]:
    """rho-bar(u^a) for every monomial of degree <= s (default: c.s)."""
    require_flat(c)
    s = c.s if s is None else s
    gens = generator_images(c)
    images: dict[tuple, ExactMatrix] = {}
    for alpha in monomials(c.g, s):
        if not any(alpha):
            images[alpha] = ExactMatrix.identity(c.rank)
            continue
        # peel one factor off the last nonzero exponent
        v = max(k for k, e in enumerate(alpha) if e)
        prev = list(alpha)
        prev[v] -= 1
        images[alpha] = images[tuple(prev)] @ gens[v]
    return images


def monodromy_on_algebra(c: Connection, x: GroupAlgebraElement,
                         images: Mapping[tuple, ExactMatrix] | None = None) -> ExactMatrix:
    """Algebra-homomorphic extension rho-bar: C pi_1 / J^{s+1} -> End(C^r)."""
    if x.g != c.g:
        raise ValueError("group algebra element and connection live over different tori")
    if x.s < c.s:
        raise TruncationTooSmall(f"truncation s={x.s} below the nilpotency length {c.s}")
    if images is None:
        images = monomial_images(c, x.s)
    r = c.rank
    acc = ExactMatrix.zeros(r, r)
    for alpha, coeff in x.coeffs.items():
        if sum(alpha) > c.s:
            continue  # rho-bar kills J^{s+1}
        acc = acc + images[alpha].scale(coeff)
    return acc


def monodromy_on_group_elements(c: Connection, x: GroupAlgebraElement) -> ExactMatrix:
    """Same map as monodromy_on_algebra, evaluated loop by loop on group elements."""
    require_flat(c)
    r = c.rank
    acc = ExactMatrix.zeros(r, r)
    for vec, coeff in to_group_elements(x).items():
        acc = acc + monodromy(c, PathWord.from_vector(vec), check=False).scale(coeff)
    return acc


def factorization_witness(c: Connection, ideal: Subspace,
                          images: Mapping[tuple, ExactMatrix] | None = None):
    """First ideal basis vector on which rho-bar is nonzero, or None."""
    mons = monomials(c.g, c.s)
    if ideal.ambient_dim != len(mons):
        raise ValueError(f"ideal lives in dimension {ideal.ambient_dim}, expected {len(mons)} "
                         f"for g={c.g}, s={c.s}")
    if images is None:
        images = monomial_images(c)
    for vec in ideal.basis:
        x = GroupAlgebraElement.from_vector(c.g, c.s, vec)
        if not monodromy_on_algebra(c, x, images).is_zero():
            return x
    return None


def factors_through(c: Connection, ideal: Subspace,
                    images: Mapping[tuple, ExactMatrix] | None = None) -> bool:
    return factorization_witness(c, ideal, images) is None


# Higgs side -------------------------------------------------------------------

@dataclass(frozen=True)
class HiggsData:
    higgs_field: Connection      # A^{1,0}
    dbar_part: Connection        # A^{0,1}

    @property
    def underlying_bundle_trivial(self) -> bool:
        return all(f.is_zero() for row in self.dbar_part.matrix for f in row)

    @property
    def higgs_field_zero(self) -> bool:
        return all(f.is_zero() for row in self.higgs_field.matrix for f in row)


def simpson_split(c: Connection) -> HiggsData:
    require_flat(c)
    return HiggsData(c.map_entries(lambda f: type_split(f)[0]),
                     c.map_entries(lambda f: type_split(f)[1]))


def sub_quotient(c: Connection, which: str) -> Connection:
    """Drop the last block (``sub``) or the first block (``quotient``)."""
    n = len(c.block_sizes)
    if n < 2:
        raise ValueError("sub/quotient needs at least two blocks")
    if which == "sub":
        keep = range(0, c.rank - c.block_sizes[-1])
        sizes = c.block_sizes[:-1]
    elif which == "quotient":
        keep = range(c.block_sizes[0], c.rank)
        sizes = c.block_sizes[1:]
    else:
        raise ValueError(f"which must be 'sub' or 'quotient', not {which!r}")
    return Connection(c.g, sizes, [[c.matrix[a][b] for b in keep] for a in keep])


def lemma_closedness(c: Connection) -> tuple[bool, tuple[int, int, int] | None]:
    """Check d_C (A^l)_{ab} = 0 for every l and entry; returns (ok, first failure (l, a, b))."""
    for l, mat in enumerate(series_terms(c), start=1):
        for a, row in enumerate(mat):
            for b, elem in enumerate(row):
                if elem and combinatorial_differential(elem):
                    return False, (l, a + 1, b + 1)
    return True, None


@dataclass
class TheoremReport:
    connection: Connection
    flat: bool
    factors_I: bool | None = None
    dbar_part_zero: bool | None = None
    factors_Ibar: bool | None = None
    higgs_zero: bool | None = None
    lemma_ok: bool | None = None
    witness_I: GroupAlgebraElement | None = None
    witness_Ibar: GroupAlgebraElement | None = None
    lemma_failure: tuple | None = None

    @property
    def trivial_bundle_agrees(self) -> bool:
        return self.factors_I == self.dbar_part_zero

    @property
    def zero_higgs_agrees(self) -> bool:
        return self.factors_Ibar == self.higgs_zero

    @property
    def agree(self) -> bool:
        return self.flat and self.trivial_bundle_agrees and self.zero_higgs_agrees and bool(self.lemma_ok)

    def lines(self) -> list[str]:
        if not self.flat:
            return [check_flat(self.connection).describe()]
        out = [
            f"trivial bundle criterion: factors through I = {_yn(self.factors_I)}, "
            f"underlying bundle trivial (A^(0,1) = 0) = {_yn(self.dbar_part_zero)} "
            f"-> {'agree' if self.trivial_bundle_agrees else 'DISAGREE'}",
            f"zero Higgs field criterion: factors through Ibar = {_yn(self.factors_Ibar)}, "
            f"Higgs field zero (A^(1,0) = 0) = {_yn(self.higgs_zero)} "
            f"-> {'agree' if self.zero_higgs_agrees else 'DISAGREE'}",
            "closedness: every entry of A^l is d_C-closed -> "
            + ("ok" if self.lemma_ok else f"FAILS at l={self.lemma_failure[0]}, "
                                          f"entry {self.lemma_failure[1:]}"),
        ]
        return out

    def certificate(self) -> str:
        """Text that reproduces a disagreement: the connection file plus the witness."""
        parts = [render_connection(self.connection).rstrip("\n")]
        if self.flat and not self.trivial_bundle_agrees:
            parts.append(_witness_text("I", self.witness_I))
        if self.flat and not self.zero_higgs_agrees:
            parts.append(_witness_text("Ibar", self.witness_Ibar))
        if self.flat and not self.lemma_ok:
            parts.append(f"# closedness of A^l fails at l={self.lemma_failure[0]}, "
                         f"entry {self.lemma_failure[1:]}")
        return "\n".join(parts) + "\n"


def _witness_text(name, w):
    if w is None:
        return f"# rho-bar vanishes on all of {name}"
    return f"# rho-bar({w}) != 0 for this element of {name}"


def _yn(flag) -> str:
    return "yes" if flag else "no"


def verify_theorems(c: Connection) -> TheoremReport:
    if not check_flat(c).flat:
        return TheoremReport(c, flat=False)
    images = monomial_images(c)
    split = simpson_split(c)
    w_i = factorization_witness(c, ideal_I(c.g, c.s, False), images)
    w_ibar = factorization_witness(c, ideal_I(c.g, c.s, True), images)
    ok, failure = lemma_closedness(c)
    return TheoremReport(
        connection=c, flat=True,
        factors_I=w_i is None, dbar_part_zero=split.underlying_bundle_trivial,
        factors_Ibar=w_ibar is None, higgs_zero=split.higgs_field_zero,
        lemma_ok=ok, witness_I=w_i, witness_Ibar=w_ibar, lemma_failure=failure,
    )


# connection files -------------------------------------------------------------

class ConnectionParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_TORUS_RE = re.compile(r"^torus\s+g\s*=\s*(\S+)\s*$")
_ENTRY_RE = re.compile(r"^entry\s+(\S+)\s+(\S+)\s+(\S+)\s+(\S+)\s*:(.*)$")


def _int_field(text: str, line: int, column: int, what: str) -> int:
    if not re.fullmatch(r"\d+", text):
        raise ConnectionParseError(f"{what} must be a positive integer, found {text!r}", line, column)
    return int(text)


def parse_connection(text: str) -> Connection:
    """Parse the line-oriented connection format.

    ``torus g=<int>`` (optional; otherwise g is the largest form index used),
    ``blocks <r1> ... <rk>``, then ``entry <i> <j> <row> <col> : <form>`` lines.
    Blank lines and ``#`` comments are ignored.
    """
    g = None
    blocks = None
    raw_entries = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        keyword = stripped.split()[0]
        if keyword == "torus":
            if g is not None:
                raise ConnectionParseError("duplicate torus line", lineno, indent + 1)
            m = _TORUS_RE.match(stripped)
            if not m:
                raise ConnectionParseError("expected 'torus g=<int>'", lineno, indent + 1)
            col = indent + stripped.index(m.group(1)) + 1
            g = _int_field(m.group(1), lineno, col, "g")
            if g < 1:
                raise ConnectionParseError("g must be >= 1", lineno, col)
        elif keyword == "blocks":
            if blocks is not None:
                raise ConnectionParseError("duplicate blocks line", lineno, indent + 1)
            sizes = []
            for m in re.finditer(r"\S+", stripped[len("blocks"):]):
                col = indent + len("blocks") + m.start() + 1
                size = _int_field(m.group(), lineno, col, "block size")
                if size < 1:
                    raise ConnectionParseError("block size must be >= 1", lineno, col)
                sizes.append(size)
            if not sizes:
                raise ConnectionParseError("blocks line lists no sizes", lineno, indent + 1)
            blocks = sizes
        elif keyword == "entry":
            if blocks is None:
                raise ConnectionParseError("entry before blocks line", lineno, indent + 1)
            m = _ENTRY_RE.match(stripped)
            if not m:
                raise ConnectionParseError("expected 'entry <i> <j> <row> <col> : <form>'",
                                           lineno, indent + 1)
            cols = [indent + m.start(k) + 1 for k in range(1, 6)]
            i, j, row, col = (_int_field(m.group(k), lineno, cols[k - 1], name)
                              for k, name in zip(range(1, 5), ("block i", "block j", "row", "col")))
            n = len(blocks)
            if not 1 <= i <= n:
                raise ConnectionParseError(f"block index {i} out of range 1..{n}", lineno, cols[0])
            if not 1 <= j <= n:
                raise ConnectionParseError(f"block index {j} out of range 1..{n}", lineno, cols[1])
            if i > j:
                raise ConnectionParseError("lower-triangular entry", lineno, cols[0])
            if i == j:
                raise ConnectionParseError("diagonal-block entry", lineno, cols[0])
            if not 1 <= row <= blocks[i - 1]:
                raise ConnectionParseError(f"row {row} out of range for block {i} of size "
                                           f"{blocks[i - 1]}", lineno, cols[2])
            if not 1 <= col <= blocks[j - 1]:
                raise ConnectionParseError(f"column {col} out of range for block {j} of size "
                                           f"{blocks[j - 1]}", lineno, cols[3])
            key = (i, j, row, col)
            if key in seen:
                raise ConnectionParseError(f"duplicate entry (first given on line {seen[key]})",
                                           lineno, indent + 1)
            seen[key] = lineno
            form_text = m.group(5)
            form_col = cols[4]
            raw_entries.append((key, form_text, lineno, form_col))
        else:
            raise ConnectionParseError(f"unknown token {keyword!r}", lineno, indent + 1)
    if blocks is None:
        raise ConnectionParseError("missing blocks line", max(1, len(text.splitlines())))
    parsed = {}
    for key, form_text, lineno, form_col in raw_entries:
        try:
            parsed[key] = (parse_form(form_text, g), lineno, form_col)
        except FormParseError as exc:
            raise ConnectionParseError(exc.message, lineno, form_col + exc.column - 1) from None
    if g is None:
        g = max((f.g for f, _, _ in parsed.values()), default=1)
    entries = {}
    for key, (f, lineno, form_col) in parsed.items():
        if f.g < g:
            f = OneForm(f.hol + (ZERO,) * (g - f.g), f.antihol + (ZERO,) * (g - f.g))
        entries[key] = f
    return Connection.from_entries(g, blocks, entries)


def render_connection(c: Connection) -> str:
    lines = [f"torus g={c.g}", "blocks " + " ".join(str(b) for b in c.block_sizes)]
    for a, b, f in c.nonzero_entries():
        i, j, row, col = c.locate(a, b)
        lines.append(f"entry {i} {j} {row} {col} : {format_form(f)}")
    return "\n".join(lines) + "\n"
