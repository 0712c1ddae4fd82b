"""Acceptance criteria, one test each, every comparison exact (tolerance zero).

Each test appends a single "criterion N PASS/FAIL: ..." line; the lines are
printed together in the terminal summary.
"""
import io
import random
import time
from itertools import combinations, product
from math import comb
from pathlib import Path

import pytest

from chenbar.bar import (BarElement, combinatorial_differential, d_I, group_hodge_filtration,
                         group_weight_filtration, ideal_I, pairing_matrix)
from chenbar.chen import PathWord, integrate_algebra, integrate_path
from chenbar.cli import run
from chenbar.connection import (check_flat, factors_through, monodromy, parse_connection,
                                render_connection, sub_quotient)
from chenbar.exact import I, ZERO, ExactMatrix, Subspace, kernel
from chenbar.group_algebra import j_power
from chenbar.randomized import KINDS, random_flat_connection, random_form, verify_random
from chenbar.torus import OneForm, period

GOLDEN = Path(__file__).parent / "golden"
TRIAL_SEED = 7
TRIAL_COUNT = 1000


def record(log, number, ok, text):
    log.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {text}")
    assert ok, text


def random_loop(rng, g, lo, hi):
    return PathWord(tuple((rng.randint(1, 2 * g), rng.choice((1, -1)))
                          for _ in range(rng.randint(lo, hi))))


def shuffles(u, v):
    n = len(u) + len(v)
    for pos in combinations(range(n), len(u)):
        it_u, it_v = iter(u), iter(v)
        yield [next(it_u) if k in pos else next(it_v) for k in range(n)]


def augmentation_product(factors):
    """(f_1 - 1)(f_2 - 1)...(f_m - 1) expanded in the free group algebra."""
    combo = {}
    for choice in product((0, 1), repeat=len(factors)):
        path = PathWord()
        for take, f in zip(choice, factors):
            if take:
                path = path * f
        sign = -1 if (len(factors) - sum(choice)) % 2 else 1
        combo[path] = combo.get(path, 0) + sign
    return combo


@pytest.fixture(scope="module")
def trials():
    start = time.perf_counter()
    result = verify_random(TRIAL_COUNT, TRIAL_SEED, g_max=2, s_max=3, r_max=6)
    return result, time.perf_counter() - start


def test_criterion_1_chen_evaluator(acceptance_log):
    rng = random.Random(2026)
    pairs, failures = 10_000, []
    start = time.perf_counter()
    for n in range(pairs):
        g = rng.randint(1, 2)
        length = rng.randint(0, 4)
        w = [random_form(rng, g, rng.choice(KINDS)) for _ in range(length)]
        p, q = random_loop(rng, g, 0, 4), random_loop(rng, g, 0, 4)
        split = sum((integrate_path(w[:k], p, g) * integrate_path(w[k:], q, g)
                     for k in range(length + 1)), ZERO)
        if integrate_path(w, p * q, g) != split:
            failures.append((n, "splitting"))
        sign = -1 if length % 2 else 1
        if integrate_path(w, p.inverse(), g) != sign * integrate_path(w[::-1], p, g):
            failures.append((n, "inversion"))
        cut = rng.randint(0, length)
        u, v = w[:cut], w[cut:]
        shuffled = sum((integrate_path(x, p, g) for x in shuffles(u, v)), ZERO)
        if integrate_path(u, p, g) * integrate_path(v, p, g) != shuffled:
            failures.append((n, "shuffle"))
        factors = [random_loop(rng, g, 1, 2) for _ in range(length + 1)]
        if integrate_algebra(w, augmentation_product(factors), g) != ZERO:
            failures.append((n, "J-vanishing"))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    record(acceptance_log, 1, ok,
           f"{pairs} (word, path) pairs, g <= 2, length <= 4: splitting, inversion, shuffle and "
           f"J^(l+1)-vanishing exact; {len(failures)} failures, {elapsed:.1f}s (< 30s)")


def test_criterion_2_bar_identities(acceptance_log):
    checked, bad = 0, []
    start = time.perf_counter()
    for g in (1, 2):
        for length in range(5):
            for w in product(range(2 * g), repeat=length):
                e = BarElement.word(g, w)
                once = combinatorial_differential(e)
                if combinatorial_differential(once) or d_I(e) or combinatorial_differential(d_I(e)) \
                        or d_I(once):
                    bad.append((g, w))
                checked += 1
    elapsed = time.perf_counter() - start
    record(acceptance_log, 2, not bad,
           f"d_C^2 = 0, d_I = 0, d_C d_I + d_I d_C = 0 on all {checked} pure-letter words "
           f"(g <= 2, length <= 4); {len(bad)} failures, {elapsed:.1f}s")


def test_criterion_3_chen_isomorphism(acceptance_log):
    rows = []
    ok = True
    for g in (1, 2):
        for s in (1, 2, 3):
            m = pairing_matrix(g, s)
            size_ok = m.rows == m.cols == comb(2 * g + s, s)
            invertible = m.determinant() != 0
            ok = ok and size_ok and invertible
            rows.append(f"(g={g},s={s}) dim {m.rows}")
    record(acceptance_log, 3, ok,
           "pairing matrix square of size C(2g+s,s) with nonzero exact determinant: "
           + ", ".join(rows))


def test_criterion_4_worked_example(acceptance_log):
    g, s = 1, 1
    # period-kernel oracle: c = x u_a + y u_b in J/J^2 pairs with a 1-form to x*P(a) + y*P(b)
    dz, dzbar = OneForm.basis(g, 0), OneForm.basis(g, 1)
    hol_kernel = kernel(ExactMatrix.from_rows([[period(dz, 1), period(dz, 2)]]))
    anti_kernel = kernel(ExactMatrix.from_rows([[period(dzbar, 1), period(dzbar, 2)]]))
    lift = lambda sub: Subspace(3, [[ZERO] + list(v) for v in sub.basis])  # noqa: E731
    expected_I = Subspace(3, [[0, I, -1]])
    expected_Ibar = Subspace(3, [[0, I, 1]])
    constants = Subspace(3, [[1, 0, 0]])
    checks = {
        "oracle I basis {i u_a - u_b}": lift(hol_kernel) == expected_I,
        "oracle Ibar basis {i u_a + u_b}": lift(anti_kernel) == expected_Ibar,
        "F^0 = C + ker(hol periods)": group_hodge_filtration(g, s, 0).space
        == constants + lift(hol_kernel),
        "I": ideal_I(g, s) == expected_I,
        "Ibar": ideal_I(g, s, conjugate=True) == expected_Ibar,
    }
    failed = [name for name, ok in checks.items() if not ok]
    record(acceptance_log, 4, not failed,
           "g=1, s=1: F^0(C pi_1/J^2) = C + span{i u_a - u_b}, I = span{i u_a - u_b}, "
           "Ibar = span{i u_a + u_b}"
           + (f"; mismatched: {', '.join(failed)}" if failed else ""))


def test_criterion_5_dual_weight_is_j_adic(acceptance_log):
    cases, bad = 0, []
    for g in (1, 2):
        for s in (1, 2, 3):
            for m in range(s + 1):
                cases += 1
                if group_weight_filtration(g, s, -m).space != j_power(m, s, g):
                    bad.append((g, s, m))
    record(acceptance_log, 5, not bad,
           f"W_(-m) = J^m as exact subspaces for {cases} cases (g <= 2, s <= 3, 0 <= m <= s)")


def test_criterion_6_representation_and_unipotence(acceptance_log):
    rng = random.Random(606)
    count, bad = 1000, []
    start = time.perf_counter()
    for n in range(count):
        g, s = rng.randint(1, 2), rng.randint(1, 3)
        c = random_flat_connection(rng, g, s, 6, KINDS[n % 3])
        p, q = random_loop(rng, g, 0, 4), random_loop(rng, g, 0, 4)
        rp, rq = monodromy(c, p), monodromy(c, q)
        if monodromy(c, p * q) != rp @ rq:
            bad.append((n, "representation"))
        nil = rp - ExactMatrix.identity(c.rank)
        if not (nil ** (c.s + 1)).is_zero():
            bad.append((n, "unipotence"))
    elapsed = time.perf_counter() - start
    record(acceptance_log, 6, not bad and elapsed < 60,
           f"rho(pq) = rho(p)rho(q) and (rho - 1)^(s+1) = 0 on {count} random flat connections "
           f"and path pairs; {len(bad)} failures, {elapsed:.1f}s (< 60s)")


def test_criterion_7_closedness_of_series_terms(acceptance_log, trials):
    result, _ = trials
    failed = [t.index for t in result.trials if not t.report.lemma_ok]
    record(acceptance_log, 7, not failed,
           f"every entry of A^l is d_C-closed on all {result.count} random flat connections; "
           f"{len(failed)} failures")


def test_criterion_8_theorem_equivalences(acceptance_log, trials):
    result, elapsed = trials
    kinds = result.kind_counts()
    outcomes = result.outcome_counts()
    balanced = all(kinds[k] >= result.count // 10 for k in KINDS)
    both_values = all(outcomes[k] for k in outcomes)
    failures = result.failures()
    ok = result.count >= 1000 and balanced and both_values and not failures and elapsed < 300
    text = (f"{result.agreements}/{result.count} agree (seed {TRIAL_SEED}, g <= 2, s <= 3, "
            f"r <= 6); specimens " + ", ".join(f"{k} {kinds[k]}" for k in KINDS)
            + f"; factors through I {outcomes['factors_I']}/{result.count}, through Ibar "
              f"{outcomes['factors_Ibar']}/{result.count}; {elapsed:.1f}s (< 300s)")
    if failures:
        text += "\n" + failures[0].report.certificate()
    record(acceptance_log, 8, ok, text)


def test_criterion_9_sub_quotient_inheritance(acceptance_log, trials):
    result, _ = trials
    checked, bad = 0, []
    for t in result.trials:
        c = t.report.connection
        for conj, factors in ((False, t.report.factors_I), (True, t.report.factors_Ibar)):
            if not factors:
                continue
            for which in ("sub", "quotient"):
                part = sub_quotient(c, which)
                checked += 1
                if not check_flat(part).flat or not factors_through(
                        part, ideal_I(c.g, part.s, conj)):
                    bad.append((t.index, which, conj))
    record(acceptance_log, 9, not bad and checked > 0,
           f"sub and quotient of every I- or Ibar-factoring specimen factor through the ideal at "
           f"s-1: {checked} checks, {len(bad)} failures")


GOLDEN_RUNS = [
    (["ideals", "--g", "1", "--s", "1"], "ideals_g1_s1.txt"),
    (["monodromy", "--file", str(GOLDEN / "j2.conn"), "--path", "a1"], "monodromy_j2_a1.txt"),
    (["classify", "--file", str(GOLDEN / "j2.conn")], "classify_j2.txt"),
    (["verify", "--random", "60", "--seed", "7"], "verify_random_60_seed7.txt"),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(argv, out, err)
    return status, out.getvalue(), err.getvalue()


def test_criterion_10_cli_contract(acceptance_log, trials, monkeypatch):
    monkeypatch.delenv("CHENBAR_SEED", raising=False)
    result, _ = trials
    problems = []
    for argv, name in GOLDEN_RUNS:
        first, second = invoke(argv), invoke(argv)
        expected = (GOLDEN / name).read_text(encoding="utf-8")
        if first != second:
            problems.append(f"{name}: not deterministic")
        if first != (0, expected, ""):
            problems.append(f"{name}: differs from golden file")
    status, out, _ = invoke(["verify", "--random", str(TRIAL_COUNT), "--seed", str(TRIAL_SEED),
                             "--g-max", "2", "--s-max", "3", "--r-max", "6", "--jobs", "4"])
    if status != 0 or f"{TRIAL_COUNT}/{TRIAL_COUNT} agree" not in out:
        problems.append("verify --random 1000 --seed 7 did not report full agreement")
    if f"{result.agreements}/{result.count} agree" not in out:
        problems.append("parallel CLI run disagrees with the serial library run")
    for t in result.trials[:200]:
        if parse_connection(render_connection(t.report.connection)) != t.report.connection:
            problems.append(f"trial {t.index}: connection file does not round-trip")
    statuses = {
        "not flat": invoke(["classify", "--file", str(GOLDEN / "notflat.conn")])[0] == 3,
        "parse error": invoke(["classify", "--file", str(GOLDEN / "lower.conn")])[0] == 2,
        "missing seed": invoke(["verify", "--random", "3"])[0] == 2,
    }
    problems.extend(f"exit status for {k}" for k, ok in statuses.items() if not ok)
    record(acceptance_log, 10, not problems,
           "golden reports byte-identical across runs, 'verify --random 1000 --seed 7' prints "
           "1000/1000 agree with exit 0, connection files round-trip, exit statuses 0/2/3 as "
           "documented" + (f"; problems: {problems}" if problems else ""))
