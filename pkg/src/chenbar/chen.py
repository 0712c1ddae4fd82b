"""Chen iterated integrals of constant 1-forms along lattice loops.

A loop is a word in the generators a_j (segment 0 -> e_j) and b_j
(segment 0 -> i e_j) and their inverses, traversed left to right from the
origin. Over one straight segment v every letter w_k restricts to the
constant c_k dt, so

    integral_v w_1 ... w_s = c_1 c_2 ... c_s / s!

and longer paths are handled by Chen's concatenation rule

    integral_{alpha beta} w = sum_i integral_alpha(w_1..w_i) * integral_beta(w_{i+1}..w_s).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Mapping, Sequence

from .exact import GQ, ONE, ZERO, GaussianRational
from .group_algebra import GroupAlgebraElement, to_group_elements
from .torus import Letter, OneForm, generator_names


@dataclass(frozen=True)
class PathWord:
    """A loop at the origin as a word of (generator 1..2g, exponent +-1)."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple((int(gen), int(exp)) for gen, exp in self.letters)
        for gen, exp in letters:
            if gen < 1:
                raise ValueError(f"generator index {gen} must be >= 1")
            if exp not in (1, -1):
                raise ValueError(f"exponent {exp} must be +1 or -1")
        object.__setattr__(self, "letters", letters)

    def __mul__(self, other: "PathWord") -> "PathWord":
        return PathWord(self.letters + other.letters)

    def inverse(self) -> "PathWord":
        return PathWord(tuple((gen, -exp) for gen, exp in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def check(self, g: int) -> "PathWord":
        for gen, _ in self.letters:
            if gen > 2 * g:
                raise ValueError(f"generator {gen} out of range for g={g}")
        return self

    def segments(self, g: int) -> list[tuple[int, ...]]:
        self.check(g)
        out = []
        for gen, exp in self.letters:
            v = [0] * (2 * g)
            v[gen - 1] = exp
            out.append(tuple(v))
        return out

    def lattice_vector(self, g: int) -> tuple[int, ...]:
        """Class of the loop in pi_1 = Z^{2g}."""
        v = [0] * (2 * g)
        for seg in self.segments(g):
            v = [a + b for a, b in zip(v, seg)]
        return tuple(v)

    @classmethod
    def from_vector(cls, vector: Sequence[int]) -> "PathWord":
        """Canonical representative a_1^{v_1} ... a_g^{v_g} b_1^{w_1} ... b_g^{w_g}."""
        letters = []
        for gen, n in enumerate(vector, start=1):
            letters.extend([(gen, 1 if n > 0 else -1)] * abs(n))
        return cls(tuple(letters))


class PathParseError(ValueError):
    pass


_PATH_TOKEN = re.compile(r"^([ab])(\d+)(\^-1)?$")


def parse_path(text: str, g: int) -> PathWord:
    """Parse ``a1 b1 a1^-1 b1^-1``; generators are numbered a_1..a_g, b_1..b_g."""
    letters = []
    for m_tok in re.finditer(r"\S+", text):
        tok, col = m_tok.group(), m_tok.start() + 1
        m = _PATH_TOKEN.match(tok)
        if not m:
            raise PathParseError(f"column {col}: unknown path token {tok!r}")
        kind, idx, inv = m.groups()
        j = int(idx)
        if not 1 <= j <= g:
            raise PathParseError(f"column {col}: {tok!r} out of range for g={g}")
        gen = j if kind == "a" else g + j
        letters.append((gen, -1 if inv else 1))
    return PathWord(tuple(letters))


def format_path(p: PathWord, g: int) -> str:
    names = {k + 1: name for k, name in enumerate(generator_names(g))}
    return " ".join(names[gen] + ("^-1" if exp < 0 else "") for gen, exp in p.letters)


def as_word(letters: Iterable, g: int) -> tuple[OneForm, ...]:
    """Normalize letters (OneForm, Letter, or basis position) into an integral word."""
    out = []
    for x in letters:
        if isinstance(x, OneForm):
            if x.g != g:
                raise ValueError("letters live on tori of different dimension")
            out.append(x)
        elif isinstance(x, Letter):
            out.append(OneForm.from_letter(x, g))
        else:
            out.append(OneForm.basis(g, int(x)))
    return tuple(out)


def _word_g(w: Sequence[OneForm]) -> int | None:
    gs = {f.g for f in w}
    if len(gs) > 1:
        raise ValueError("letters live on tori of different dimension")
    return gs.pop() if gs else None


def integrate_segment(w: Sequence[OneForm], v: Sequence[int]) -> GaussianRational:
    """Iterated integral of the word over the straight segment 0 -> v."""
    acc = ONE
    for f in w:
        acc = acc * f.value_on(v)
        if not acc:
            return ZERO
    return acc / factorial(len(w)) if w else ONE


def _straight_runs(segments: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Merge consecutive equal steps into one straight segment (m steps of v = segment m*v)."""
    runs: list[list] = []
    for v in segments:
        v = tuple(v)
        if runs and runs[-1][0] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return [tuple(m * x for x in v) for v, m in runs]


def prefix_integrals(w: Sequence[OneForm], segments: Iterable[Sequence[int]]) -> list[GaussianRational]:
    """Integrals of all prefixes w[:k], k = 0..len(w), along the concatenated segments."""
    n = len(w)
    prefix = [ONE] + [ZERO] * n
    values_on: dict[tuple, list] = {}
    for v in _straight_runs(segments):
        vals = values_on.get(v)
        if vals is None:
            vals = values_on[v] = [f.value_on(v) for f in w]
        # new[k] = sum_i prefix[i] * vals[i] ... vals[k-1] / (k-i)!, updated from the top down
        for k in range(n, 0, -1):
            acc = prefix[k]
            prod = ONE
            for i in range(k - 1, -1, -1):
                prod = prod * vals[i]
                if not prod:
                    break
                prod = prod / (k - i)
                if prefix[i]:
                    acc = acc + prefix[i] * prod
            prefix[k] = acc
    return prefix


def integrate_path(w: Sequence, p: PathWord, g: int | None = None) -> GaussianRational:
    """Iterated integral of the word ``w`` along the loop ``p``."""
    if g is None:
        g = _word_g([x for x in w if isinstance(x, OneForm)])
    if not w:
        return ONE
    if g is None:
        raise ValueError("g is required for words given by letters or positions")
    word = as_word(w, g)
    return prefix_integrals(word, p.segments(g))[-1]


def integrate_vector(w: Sequence[OneForm], vector: Sequence[int]) -> GaussianRational:
    """Integral over the canonical loop representing a lattice vector."""
    g = len(vector) // 2
    return integrate_path(as_word(w, g), PathWord.from_vector(vector), g)


class TruncationError(ValueError):
    pass


def integrate_algebra(w: Sequence, c, g: int | None = None) -> GaussianRational:
    """Linear extension of the integral to group algebra elements.

    ``c`` is a GroupAlgebraElement or a mapping from lattice vectors (or
    PathWords) to coefficients. Group elements are integrated over their
    canonical representative loop, see :meth:`PathWord.from_vector`.
    """
    if isinstance(c, GroupAlgebraElement):
        if len(w) > c.s:
            raise TruncationError(f"word of length {len(w)} is not defined on C pi_1 / J^{c.s + 1}")
        g = c.g
        combo: Mapping = to_group_elements(c)
    else:
        combo = c
        if g is None:
            raise ValueError("g is required when integrating a plain combination")
    word = as_word(w, g)
    acc = ZERO
    for elem, coeff in combo.items():
        path = elem if isinstance(elem, PathWord) else PathWord.from_vector(elem)
        acc = acc + GQ.coerce(coeff) * integrate_path(word, path, g)
    return acc
