"""Random flat connections and the randomized theorem verifier.

Every trial draws from its own ``random.Random(f"{seed}:{index}")`` so a
trial can be reproduced in isolation and trials may run in any order or in
parallel without changing the outcome.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .connection import Connection, TheoremReport, check_flat, verify_theorems
from .exact import GQ, ZERO
from .torus import OneForm

KINDS = ("hol", "antihol", "mixed")

_NUMERATORS = (-3, -2, -1, 1, 2, 3)
_DENOMINATORS = (1, 1, 1, 2, 3)


def random_scalar(rng: random.Random, allow_zero: bool = True) -> GQ:
    while True:
        re_ = Fraction(rng.choice(_NUMERATORS), rng.choice(_DENOMINATORS)) if rng.random() < 0.7 else 0
        im_ = Fraction(rng.choice(_NUMERATORS), rng.choice(_DENOMINATORS)) if rng.random() < 0.4 else 0
        x = GQ(re_, im_)
        if x or allow_zero:
            return x


def _random_part(rng: random.Random, g: int) -> tuple:
    coeffs = [random_scalar(rng) if rng.random() < 0.6 else ZERO for _ in range(g)]
    if not any(coeffs):
        coeffs[rng.randrange(g)] = random_scalar(rng, allow_zero=False)
    return tuple(coeffs)


def random_form(rng: random.Random, g: int, kind: str) -> OneForm:
    """Nonzero constant 1-form of type (1,0), (0,1), or with both parts nonzero."""
    zero = (ZERO,) * g
    if kind == "hol":
        return OneForm(_random_part(rng, g), zero)
    if kind == "antihol":
        return OneForm(zero, _random_part(rng, g))
    if kind == "mixed":
        return OneForm(_random_part(rng, g), _random_part(rng, g))
    raise ValueError(f"unknown kind {kind!r}")


def connection_kind(c: Connection) -> str:
    """'zero', 'hol', 'antihol' or 'mixed' according to the actual entries."""
    t10, t01 = c.is_type_10, c.is_type_01
    if t10 and t01:
        return "zero"
    if t10:
        return "hol"
    if t01:
        return "antihol"
    return "mixed"


def random_block_sizes(rng: random.Random, s: int, r_max: int) -> list[int]:
    r = rng.randint(s + 1, max(s + 1, r_max))
    cuts = sorted(rng.sample(range(1, r), s))
    bounds = [0] + cuts + [r]
    return [bounds[k + 1] - bounds[k] for k in range(s + 1)]


def _upper_positions(sizes):
    offs = [0]
    for b in sizes:
        offs.append(offs[-1] + b)
    out = []
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            for a in range(offs[i], offs[i + 1]):
                for b in range(offs[j], offs[j + 1]):
                    out.append((a, b, i, j))
    return out


def _entry_kind(rng: random.Random, kind: str) -> str:
    return rng.choice(KINDS) if kind == "mixed" else kind


def _build(rng: random.Random, g: int, sizes, kind: str, strategy: str) -> Connection:
    r = sum(sizes)
    mat = [[OneForm.zero(g) for _ in range(r)] for _ in range(r)]
    positions = _upper_positions(sizes)
    last = len(sizes) - 1
    if strategy == "proportional":
        # A = M theta: A ^ A = (M M) theta ^ theta = 0
        theta = random_form(rng, g, kind)
        for a, b, _, _ in positions:
            if rng.random() < 0.7:
                mat[a][b] = theta.scale(random_scalar(rng, allow_zero=False))
    elif strategy in ("first_row", "last_column"):
        # a single nonzero block row (or column) squares to zero as a matrix
        for a, b, i, j in positions:
            if (i == 0 if strategy == "first_row" else j == last) and rng.random() < 0.7:
                mat[a][b] = random_form(rng, g, _entry_kind(rng, kind))
    elif strategy == "sparse":
        density = rng.choice((0.2, 0.4, 0.7))
        for a, b, _, _ in positions:
            if rng.random() < density:
                mat[a][b] = random_form(rng, g, _entry_kind(rng, kind))
    else:
        raise ValueError(strategy)
    return Connection(g, sizes, mat)


STRATEGIES = ("proportional", "first_row", "last_column", "sparse")


def random_flat_connection(rng: random.Random, g: int, s: int, r_max: int, kind: str,
                           max_tries: int = 200) -> Connection:
    """Flat connection with s+1 blocks, rank <= r_max, whose entries are of ``kind``.

    Rejection sampling over a mix of constructions; falls back to the
    proportional construction, which is flat by design.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if s + 1 > r_max:
        raise ValueError(f"{s + 1} blocks do not fit in rank {r_max}")
    sizes = random_block_sizes(rng, s, r_max)
    for _ in range(max_tries):
        c = _build(rng, g, sizes, kind, rng.choice(STRATEGIES))
        if connection_kind(c) == kind and check_flat(c).flat:
            return c
    while True:
        c = _build(rng, g, sizes, kind, "proportional")
        if connection_kind(c) == kind:
            return c


@dataclass
class Trial:
    index: int
    kind: str
    report: TheoremReport


def run_trial(seed, index: int, g_max: int, s_max: int, r_max: int) -> Trial:
    rng = random.Random(f"{seed}:{index}")
    kind = KINDS[index % len(KINDS)]
    g = rng.randint(1, g_max)
    s = rng.randint(1, min(s_max, r_max - 1))
    c = random_flat_connection(rng, g, s, r_max, kind)
    return Trial(index, kind, verify_theorems(c))


def _run_chunk(args):
    seed, indices, g_max, s_max, r_max = args
    return [run_trial(seed, k, g_max, s_max, r_max) for k in indices]


@dataclass
class VerifyResult:
    trials: list[Trial] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.trials)

    @property
    def agreements(self) -> int:
        return sum(1 for t in self.trials if t.report.agree)

    def failures(self) -> list[Trial]:
        return [t for t in self.trials if not t.report.agree]

    def kind_counts(self) -> dict[str, int]:
        out = {k: 0 for k in KINDS}
        for t in self.trials:
            out[t.kind] += 1
        return out

    def outcome_counts(self) -> dict[str, int]:
        """How often each truth value occurred on each side of each theorem."""
        out = {"factors_I": 0, "not_factors_I": 0, "factors_Ibar": 0, "not_factors_Ibar": 0}
        for t in self.trials:
            rep = t.report
            out["factors_I" if rep.factors_I else "not_factors_I"] += 1
            out["factors_Ibar" if rep.factors_Ibar else "not_factors_Ibar"] += 1
        return out


def verify_random(count: int, seed, g_max: int = 2, s_max: int = 3, r_max: int = 6,
                  jobs: int = 1) -> VerifyResult:
    if count < 0:
        raise ValueError("count must be >= 0")
    if min(g_max, s_max) < 1 or r_max < 2:
        raise ValueError("need g-max >= 1, s-max >= 1 and r-max >= 2")
    if jobs <= 1:
        return VerifyResult([run_trial(seed, k, g_max, s_max, r_max) for k in range(count)])
    chunks = [(seed, list(range(k, count, jobs)), g_max, s_max, r_max) for k in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        trials = [t for chunk in pool.map(_run_chunk, chunks) for t in chunk]
    trials.sort(key=lambda t: t.index)
    return VerifyResult(trials)
