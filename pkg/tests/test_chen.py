from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chenbar.chen import (PathParseError, PathWord, TruncationError, format_path, integrate_algebra,
                          integrate_path, integrate_segment, integrate_vector, parse_path)
from chenbar.exact import GQ, I, ONE, ZERO
from chenbar.group_algebra import GroupAlgebraElement, monomials
from chenbar.torus import Letter, OneForm
from conftest import gaussian
from oracles import iterated_integral_bruteforce, sympy_iterated_integral

DZ1 = OneForm.from_letter(Letter("dz", 1), 1)
DZBAR1 = OneForm.from_letter(Letter("dzbar", 1), 1)


def one_forms(g):
    return st.lists(gaussian, min_size=2 * g, max_size=2 * g).map(OneForm.from_coefficients)


def words(g, max_size=4):
    return st.lists(one_forms(g), max_size=max_size)


def loops(g, max_size=5):
    return st.lists(st.tuples(st.integers(1, 2 * g), st.sampled_from([1, -1])),
                    max_size=max_size).map(PathWord)


@pytest.mark.parametrize("word", [[DZ1], [DZ1, DZ1], [DZ1, DZBAR1]])
def test_single_segment_against_symbolic_simplex(word):
    values = [f.value_on((1, 0)) for f in word]
    expected = sympy_iterated_integral(values)
    assert integrate_segment(word, (1, 0)) == expected
    assert expected == [ONE, GQ(1) / 2, GQ(1) / 2][len(word) - 1]


def test_path_examples():
    g = 1
    assert integrate_path([DZ1, DZ1], parse_path("a1 b1", g)) == I
    assert integrate_path([DZ1, DZ1], parse_path("b1 a1", g)) == I
    # 1/2 + (1)(-i) + (i)(-i)/2 = 1 - i, expanded over the two segments
    assert integrate_path([DZ1, DZBAR1], parse_path("a1 b1", g)) == ONE - I
    assert integrate_path([DZ1], parse_path("a1^-1", g)) == -ONE
    two = parse_path("a1 a1", g)
    assert integrate_path([DZ1], two) == 2
    assert integrate_segment([DZ1], (2, 0)) == 2
    assert integrate_vector([DZ1], (2, 0)) == 2


def test_path_examples_against_bruteforce():
    g = 1
    for word, path in [([DZ1, DZBAR1], "a1 b1"), ([DZ1, DZBAR1], "b1 a1"),
                       ([DZ1, DZ1, DZBAR1], "a1 b1 a1^-1 b1^-1"), ([DZBAR1] * 3, "b1 b1 a1")]:
        p = parse_path(path, g)
        brute = iterated_integral_bruteforce([f.coefficients for f in word], p.segments(g), g)
        assert integrate_path(word, p) == brute


def test_empty_word_and_empty_path():
    assert integrate_path([], parse_path("a1 b1", 1)) == ONE
    assert integrate_path([DZ1], PathWord()) == ZERO
    assert integrate_path([0, 0], parse_path("a1 b1", 1), g=1) == I
    with pytest.raises(ValueError):
        integrate_path([0], parse_path("a1", 1))


@given(words(2), loops(2))
def test_matches_bruteforce_oracle(w, p):
    segs = p.segments(2)
    assert integrate_path(w, p, 2) == iterated_integral_bruteforce(
        [f.coefficients for f in w], segs, 2)


@given(words(2), loops(2, 3), loops(2, 3))
def test_concatenation_splitting(w, a, b):
    lhs = integrate_path(w, a * b, 2)
    rhs = sum((integrate_path(w[:k], a, 2) * integrate_path(w[k:], b, 2)
               for k in range(len(w) + 1)), ZERO)
    assert lhs == rhs


@given(words(2), loops(2))
def test_inversion(w, p):
    sign = -1 if len(w) % 2 else 1
    assert integrate_path(w, p.inverse(), 2) == sign * integrate_path(list(reversed(w)), p, 2)


@given(words(1, 3), loops(1))
def test_reverse_word_over_whole_path(w, p):
    # integrals of reversed words over loops and their inverses satisfy
    # sum_k (-1)^k int(w_k..w_1) int(w_{k+1}..w_s) = 0 for s >= 1
    if not w:
        return
    total = ZERO
    for k in range(len(w) + 1):
        head = list(reversed(w[:k]))
        total = total + (-1) ** k * integrate_path(head, p, 1) * integrate_path(w[k:], p, 1)
    assert total == ZERO


def shuffles(u, v):
    n = len(u) + len(v)
    for pos in combinations(range(n), len(u)):
        out, iu, iv = [], 0, 0
        for k in range(n):
            if k in pos:
                out.append(u[iu])
                iu += 1
            else:
                out.append(v[iv])
                iv += 1
        yield out


@given(words(1, 2), words(1, 2), loops(1))
def test_shuffle_product(u, v, p):
    lhs = integrate_path(u, p, 1) * integrate_path(v, p, 1)
    rhs = sum((integrate_path(x, p, 1) for x in shuffles(u, v)), ZERO)
    assert lhs == rhs


def test_integrate_algebra_examples():
    g, s = 1, 2
    u_a = GroupAlgebraElement.u(g, s, 1)
    u_b = GroupAlgebraElement.u(g, s, 2)
    assert integrate_algebra([DZ1], u_a * u_b) == ZERO
    assert integrate_algebra([], u_a) == ZERO
    assert integrate_algebra([DZ1, DZ1], u_a * u_a) == ONE
    with pytest.raises(TruncationError):
        integrate_algebra([DZ1] * 3, u_a)


@given(words(1, 3), st.sampled_from(monomials(1, 3)))
def test_short_words_vanish_on_higher_powers(w, alpha):
    x = GroupAlgebraElement(1, 3, {alpha: ONE})
    if len(w) < sum(alpha):
        assert integrate_algebra(w, x) == ZERO


def test_integrate_algebra_on_plain_combination():
    combo = {(1, 0): ONE, (0, 0): -ONE}
    assert integrate_algebra([DZ1], combo, g=1) == ONE
    with pytest.raises(ValueError):
        integrate_algebra([DZ1], combo)


@pytest.mark.parametrize("text,g", [("a1 b1 a1^-1 b1^-1", 1), ("b2^-1 a1", 2), ("", 1)])
def test_path_round_trip(text, g):
    assert format_path(parse_path(text, g), g) == text


@pytest.mark.parametrize("bad,col", [("a1 c1", 4), ("a1 a3", 4), ("a1^2", 1)])
def test_path_parse_errors(bad, col):
    with pytest.raises(PathParseError, match=f"column {col}"):
        parse_path(bad, 2)
