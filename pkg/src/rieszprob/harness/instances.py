"""Seeded random instances.

Each (seed, property id, trial index) triple gets its own Philox stream, a
counter-based generator, so results do not depend on execution order or on
which worker runs the trial.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..expectation import (
    BernoulliProcess,
    CondExpectation,
    lift_coin_function,
    make_bernoulli_process,
    make_cond_expectation,
)
from ..lattice import Element, Space, make_space
from .config import SuiteConfig


def property_key(property_id: str) -> int:
    return zlib.crc32(property_id.encode("utf-8"))


def trial_rng(seed: int, property_id: str, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, property_key(property_id), trial])
    return np.random.Generator(np.random.Philox(ss))


def random_space(rng: np.random.Generator, max_atoms: int, min_atoms: int = 1) -> Space:
    m = int(rng.integers(min_atoms, max_atoms + 1))
    return make_space(rng.uniform(0.05, 1.0, size=m))


def random_element(rng: np.random.Generator, space: Space, bound: float = 5.0) -> Element:
    return Element(space, rng.uniform(-bound, bound, size=space.atom_count))


def random_partition(rng: np.random.Generator, m: int, max_blocks: int) -> List[List[int]]:
    k = int(rng.integers(1, min(max_blocks, m) + 1))
    perm = rng.permutation(m)
    labels = np.empty(m, dtype=np.int64)
    labels[perm[:k]] = np.arange(k)
    labels[perm[k:]] = rng.integers(0, k, size=m - k)
    return [np.flatnonzero(labels == b).tolist() for b in range(k)]


def random_cond_expectation(rng, cfg: SuiteConfig, max_atoms: int = None) -> CondExpectation:
    space = random_space(rng, max_atoms or cfg.max_base_atoms)
    return make_cond_expectation(space, random_partition(rng, space.atom_count, cfg.max_base_blocks))


def gen_process(rng: np.random.Generator, cfg: SuiteConfig, min_coins: int = 1) -> BernoulliProcess:
    """Random base partition, per-block success probabilities and coin count."""
    base_T = random_cond_expectation(rng, cfg)
    lo, hi = cfg.p_range
    p_blocks = rng.uniform(lo, hi, size=base_T.block_count)
    n = int(rng.integers(min(min_coins, cfg.max_coins), cfg.max_coins + 1))
    p = Element(base_T.space, p_blocks[base_T.labels])
    return make_bernoulli_process(base_T, p, n)


def split_coins(rng: np.random.Generator, n: int, k: int) -> List[List[int]]:
    """``k`` disjoint nonempty groups of coin indices drawn from ``1..n``."""
    used = int(rng.integers(k, n + 1))
    coins = (rng.permutation(n)[:used] + 1).tolist()
    cuts = np.sort(rng.choice(np.arange(1, used), size=k - 1, replace=False)) if k > 1 else []
    groups, start = [], 0
    for c in list(cuts) + [used]:
        groups.append(sorted(coins[start:int(c)]))
        start = int(c)
    return groups


@dataclass(frozen=True, eq=False)
class Family:
    """Conditionally independent summands built on disjoint coin groups."""

    proc: BernoulliProcess
    members: Tuple[Element, ...]
    groups: Tuple[Tuple[int, ...], ...]
    bounds: Tuple[Tuple[float, float], ...]

    @property
    def T(self) -> CondExpectation:
        return self.proc.lifted_T

    def descriptor(self) -> dict:
        d = self.proc.descriptor()
        d["groups"] = [list(g) for g in self.groups]
        d["bounds"] = [list(b) for b in self.bounds]
        return d


def _bounded_table(rng, blocks: int, width: int, a: float, b: float) -> np.ndarray:
    table = rng.uniform(a, b, size=(blocks, width))
    # pin the range on a random cell so the bounds are attained some of the time
    if rng.random() < 0.5:
        table[rng.integers(blocks), rng.integers(width)] = b
    if rng.random() < 0.5:
        table[rng.integers(blocks), rng.integers(width)] = a
    return table


def gen_family(
    rng: np.random.Generator, cfg: SuiteConfig, kind: str = "hoeffding", max_members: int = 4
) -> Family:
    """Independent bounded family on a random Bernoulli process.

    ``kind="hoeffding"`` draws ``[a_i, b_i]`` inside ``[-2, 2]``;
    ``kind="bennett"`` draws ``[a_i, 1]`` with ``a_i`` in ``[-2, 1)`` so that
    every member is dominated by the unit.
    """
    k = int(rng.integers(1, min(max_members, cfg.max_coins) + 1))
    proc = gen_process(rng, cfg, min_coins=k)
    groups = split_coins(rng, proc.n, k)
    members, bounds = [], []
    for g in groups:
        if kind == "bennett":
            a, b = float(rng.uniform(-2.0, 0.9)), 1.0
        elif kind == "hoeffding":
            a, b = sorted(rng.uniform(-2.0, 2.0, size=2).tolist())
            if b - a < 0.1:
                a, b = max(-2.0, a - 0.1), min(2.0, b + 0.1)
        else:
            raise ValueError(f"unknown family kind {kind!r}")
        table = _bounded_table(rng, proc.base.block_count, 1 << len(g), a, b)
        members.append(lift_coin_function(proc, g, table))
        bounds.append((a, b))
    return Family(proc, tuple(members), tuple(tuple(g) for g in groups), tuple(bounds))


def gen_instance(rng: np.random.Generator, cfg: SuiteConfig, kind: str = "process"):
    """A Bernoulli process (``kind="process"``) or an independent bounded family."""
    if kind == "process":
        return gen_process(rng, cfg)
    return gen_family(rng, cfg, kind)
