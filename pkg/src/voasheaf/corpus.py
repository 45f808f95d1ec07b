"""Seeded sample states and coefficient grids used by the suites."""

from __future__ import annotations

import random
from typing import Sequence

from .ratfunc import RatFunc
from .vacore import Engine, Mode, State, e, g, lmode, u, v

SAMPLE_TEXTS = ("1", "x1", "x1*x2", "1/x1")


def default_samples(n: int) -> list[RatFunc]:
    """The coefficient grid {1, x1, x1x2, 1/x1}; x1x2 needs two variables."""
    return [RatFunc.parse(s, n) for s in SAMPLE_TEXTS if n >= 2 or "x2" not in s]


def parse_samples(texts: Sequence[str], n: int) -> list[RatFunc]:
    return [RatFunc.parse(s, n) for s in texts]


def creation_modes(engine: Engine, level: int) -> list[Mode]:
    """Creation modes of the vacuum module at a given negative level."""
    N = engine.N
    out: list[Mode] = []
    for p in range(1, N + 1):
        out += [u(p, level), v(p, level)]
    out += [e(a, b, level) for a in range(1, N + 1) for b in range(1, N + 1)]
    out += [g(i, level) for i in range(engine.alg.dim)]
    if level <= -2:
        out.append(lmode(level))
    return out


def random_word(engine: Engine, rng: random.Random, degree: int) -> list[Mode]:
    modes = []
    left = degree
    while left > 0:
        lvl = rng.randint(1, left)
        if lvl == 1 and left >= 2 and rng.random() < 0.3:
            lvl = 2
        modes.append(rng.choice(creation_modes(engine, -lvl)))
        left -= lvl
    return modes


def random_state(
    engine: Engine, rng: random.Random, degree: int, samples: Sequence[RatFunc], terms: int = 1
) -> State:
    """A homogeneous state of the given degree built from random monomials."""
    out = engine.state()
    for _ in range(terms):
        out = out + engine.normal_order(random_word(engine, rng, degree), rng.choice(list(samples)))
    return out


def random_states(
    engine: Engine, rng: random.Random, count: int, max_degree: int, samples: Sequence[RatFunc]
) -> list[State]:
    return [random_state(engine, rng, rng.randint(0, max_degree), samples) for _ in range(count)]
