"""Conditional expectations, conditional independence and Bernoulli processes.

A conditional expectation on a finite carrier is block averaging over a
partition of the atoms.  Because every atom weight is strictly positive, the
operator is strictly positive, fixes the unit, is idempotent and has the
averaging property ``T(g f) = g T(f)`` for block-constant ``g``.

Independence of arbitrary elements cannot be decided from finitely many
moments, so two kinds of tool are offered: checkers of necessary conditions
(which can only falsify) and constructors that produce independent families
by product measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .calculus import exp_pointwise, mgf
from .errors import (
    IndexOutOfRange,
    NonPositiveLambda,
    NotAPartition,
    NotInRange,
    ProbabilityOutOfRange,
    ProductTooLarge,
    RieszError,
    SpaceMismatch,
)
from .lattice import (
    BandProjection,
    Element,
    Space,
    _check_same,
    make_space,
    multiply,
    scale,
    unit,
)
from .report import BoundReport

__all__ = [
    "CondExpectation",
    "BernoulliProcess",
    "make_cond_expectation",
    "apply_T",
    "range_contains",
    "check_T_independent_projections",
    "check_T_independent_elements",
    "make_bernoulli_process",
    "partial_sum",
    "lemma_indep_product",
    "lift_coin_function",
    "lift_base",
    "DEFAULT_PRODUCT_CAP",
]

DEFAULT_PRODUCT_CAP = 1 << 22


def _labels_from_blocks(n_atoms: int, blocks) -> np.ndarray:
    labels = np.full(n_atoms, -1, dtype=np.int64)
    for b, block in enumerate(blocks):
        block = list(block)
        if not block:
            raise NotAPartition(f"block {b} is empty")
        for a in block:
            a = int(a)
            if not 0 <= a < n_atoms:
                raise NotAPartition(f"atom {a} is not on the carrier")
            if labels[a] != -1:
                raise NotAPartition(f"atom {a} appears in blocks {labels[a]} and {b}")
            labels[a] = b
    gaps = np.flatnonzero(labels < 0)
    if gaps.size:
        raise NotAPartition(f"atom {int(gaps[0])} is not covered by any block")
    return labels


class CondExpectation:
    """Block-averaging conditional expectation on a :class:`Space`.

    ``(T f)_x = sum_{y ~ x} w_y f_y / sum_{y ~ x} w_y`` where ``y ~ x`` means
    the two atoms share a block.
    """

    __slots__ = ("_space", "_labels", "_block_weight", "_order", "_starts")

    def __init__(self, space: Space, blocks=None, *, labels=None):
        if (blocks is None) == (labels is None):
            raise RieszError("pass exactly one of blocks or labels")
        if labels is None:
            lab = _labels_from_blocks(space.atom_count, blocks)
        else:
            lab = np.asarray(labels, dtype=np.int64).ravel()
            if lab.size != space.atom_count:
                raise NotAPartition("one label per atom required")
            if lab.min() < 0:
                raise NotAPartition("labels must be non-negative")
            present = np.unique(lab)
            if present.size != lab.max() + 1:
                raise NotAPartition("block labels must be 0..k-1 with every block nonempty")
        lab.setflags(write=False)
        self._space = space
        self._labels = lab
        bw = np.bincount(lab, weights=space.weights)
        bw.setflags(write=False)
        self._block_weight = bw
        order = np.argsort(lab, kind="stable")
        self._order = order
        self._starts = np.searchsorted(lab[order], np.arange(bw.size))

    @property
    def space(self) -> Space:
        return self._space

    @property
    def labels(self) -> np.ndarray:
        """Block id of every atom."""
        return self._labels

    @property
    def block_count(self) -> int:
        return int(self._block_weight.size)

    @property
    def block_weights(self) -> np.ndarray:
        return self._block_weight

    @property
    def blocks(self) -> List[Tuple[int, ...]]:
        return [
            tuple(sorted(self._order[s:e].tolist()))
            for s, e in zip(self._starts, list(self._starts[1:]) + [self._labels.size])
        ]

    def block_values(self, f: Element) -> np.ndarray:
        """Per-block conditional averages of ``f``."""
        if f.space is not self._space:
            raise SpaceMismatch("element is not on the operator's space")
        v = f.values
        avg = np.bincount(self._labels, weights=self._space.weights * v) / self._block_weight
        # block-constant input is returned verbatim so that T u = u and T T = T hold exactly
        sv = v[self._order]
        lo = np.minimum.reduceat(sv, self._starts)
        hi = np.maximum.reduceat(sv, self._starts)
        return np.where(lo == hi, lo, avg)

    def apply(self, f: Element) -> Element:
        return Element(self._space, self.block_values(f)[self._labels])

    __call__ = apply

    def block_spread(self, f: Element) -> np.ndarray:
        if f.space is not self._space:
            raise SpaceMismatch("element is not on the operator's space")
        sv = f.values[self._order]
        return np.maximum.reduceat(sv, self._starts) - np.minimum.reduceat(sv, self._starts)

    def __repr__(self):
        return f"CondExpectation(atoms={self._space.atom_count}, blocks={self.block_count})"


def make_cond_expectation(space: Space, blocks: Iterable[Iterable[int]]) -> CondExpectation:
    return CondExpectation(space, [list(b) for b in blocks])


def apply_T(T: CondExpectation, f: Element) -> Element:
    return T.apply(f)


def range_contains(T: CondExpectation, f: Element, tol: float = 0.0) -> bool:
    """Whether ``f`` is constant on every block, up to ``tol * (1 + |f|)``."""
    spread = T.block_spread(f)
    sv = np.abs(f.values[T._order])
    size = np.maximum.reduceat(sv, T._starts)
    return bool(np.all(spread <= tol * (1.0 + size)))


def check_T_independent_projections(
    T: CondExpectation, P: BandProjection, Q: BandProjection, tol: float = 1e-9
) -> BoundReport:
    """Compare ``T(Pu Qu)`` with ``T(Pu) T(Qu)``."""
    if P.space is not T.space or Q.space is not T.space:
        raise SpaceMismatch("projections and operator must share a space")
    pu, qu = P.indicator(), Q.indicator()
    lhs = T.apply(multiply(pu, qu))
    rhs = multiply(T.apply(pu), T.apply(qu))
    return BoundReport.eq("T_independent_projections", lhs, rhs, tol)


def check_T_independent_elements(
    T: CondExpectation,
    f: Element,
    g: Element,
    max_degree: int = 4,
    t_grid: Sequence[float] = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0),
    tol: float = 1e-10,
) -> BoundReport:
    """Necessary conditions for conditional independence of ``f`` and ``g``.

    Checks ``T(f^n g^m) = T(f^n) T(g^m)`` for ``1 <= n, m <= max_degree`` and
    ``M_{f+g}(t) = M_f(t) M_g(t)`` on ``t_grid``.  A pass means "not
    falsified"; it does not prove independence.  The returned report is
    the first failing sub-check or, if all pass, the tightest one.
    """
    if max_degree < 1:
        raise RieszError("max_degree must be >= 1")
    _check_same(f, g)
    if f.space is not T.space:
        raise SpaceMismatch("elements are not on the operator's space")
    worst = None
    fp = [unit(f.space)]
    gp = [unit(g.space)]
    for _ in range(max_degree):
        fp.append(multiply(fp[-1], f))
        gp.append(multiply(gp[-1], g))
    Tf = [T.apply(x) for x in fp]
    Tg = [T.apply(x) for x in gp]
    subchecks = []
    for n in range(1, max_degree + 1):
        for m in range(1, max_degree + 1):
            lhs = T.apply(multiply(fp[n], gp[m]))
            rhs = multiply(Tf[n], Tg[m])
            subchecks.append(BoundReport.eq("moment_factorization", lhs, rhs, tol, n=n, m=m))
    fg = f + g
    for t in t_grid:
        lhs = mgf(T, fg, t)
        rhs = multiply(mgf(T, f, t), mgf(T, g, t))
        subchecks.append(BoundReport.eq("mgf_factorization", lhs, rhs, tol, t=float(t)))
    for rep in subchecks:
        if not rep.holds:
            return rep
        if worst is None or rep.normalized_margin() < worst.normalized_margin():
            worst = rep
    return worst


@dataclass(frozen=True, eq=False)
class BernoulliProcess:
    """Independent coins realized on a product carrier.

    Atoms are ordered base-major; within a base atom the coin pattern index
    is little-endian, so coin ``i`` (1-based) is bit ``i - 1``.
    """

    base: CondExpectation
    n: int
    product_space: Space
    lifted_T: CondExpectation
    projections: Tuple[BandProjection, ...]
    success: Element
    p_base: Element
    base_atom: np.ndarray
    coin_bits: np.ndarray

    @property
    def p_blocks(self) -> np.ndarray:
        """Success probability of each base block."""
        return self.base.block_values(self.p_base)

    def coin(self, i: int) -> Element:
        """``P_i u`` for 1-based coin index ``i``."""
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"coin index {i} outside 1..{self.n}")
        return self.projections[i - 1].indicator()

    def descriptor(self) -> dict:
        return {
            "base_weights": self.base.space.weights.tolist(),
            "blocks": [list(b) for b in self.base.blocks],
            "p": self.p_blocks.tolist(),
            "n": self.n,
        }


def make_bernoulli_process(
    base_T: CondExpectation, p: Element, n: int, cap: int = DEFAULT_PRODUCT_CAP
) -> BernoulliProcess:
    """Product-measure construction of ``n`` conditionally independent coins.

    The coin bias on base block ``B`` is the (constant) value of ``p`` there.
    """
    if p.space is not base_T.space:
        raise SpaceMismatch("p must live on the base space")
    if int(n) != n or n < 1:
        raise IndexOutOfRange("need at least one coin")
    n = int(n)
    if not range_contains(base_T, p, 0.0):
        raise NotInRange("p must be constant on every block of the base operator")
    pv = p.values
    bad = np.flatnonzero(~((pv > 0) & (pv < 1)))
    if bad.size:
        raise ProbabilityOutOfRange(f"p at base atom {int(bad[0])} is {pv[bad[0]]!r}, need 0 < p < 1")
    m = base_T.space.atom_count
    if m * (1 << n) > cap:
        raise ProductTooLarge(f"{m} * 2^{n} atoms exceeds the cap of {cap}")

    patterns = np.arange(1 << n, dtype=np.int64)
    bits = ((patterns[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    k = bits.sum(axis=1).astype(float)
    pat_w = pv[:, None] ** k[None, :] * (1.0 - pv[:, None]) ** (n - k)[None, :]
    weights = (base_T.space.weights[:, None] * pat_w).ravel()
    space = make_space(weights)

    base_atom = np.repeat(np.arange(m), 1 << n)
    base_atom.setflags(write=False)
    coin_bits = np.tile(bits, (m, 1))
    coin_bits.setflags(write=False)
    lifted = CondExpectation(space, labels=base_T.labels[base_atom])
    projections = tuple(BandProjection(space, coin_bits[:, i].astype(bool)) for i in range(n))
    success = Element(space, pv[base_atom])
    return BernoulliProcess(base_T, n, space, lifted, projections, success, p, base_atom, coin_bits)


def partial_sum(proc: BernoulliProcess, n: int) -> Element:
    """``S_n = P_1 u + ... + P_n u``, the number of heads among the first ``n`` coins."""
    if not 1 <= n <= proc.n:
        raise IndexOutOfRange(f"n={n} outside 1..{proc.n}")
    return Element(proc.product_space, proc.coin_bits[:, :n].sum(axis=1))


def lemma_indep_product(proc: BernoulliProcess, lam: float, n: int) -> Tuple[Element, Element]:
    """Both sides of ``T prod_i exp(lam P_i u) = (u + (e^lam - 1) f)^n``."""
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be > 0, got {lam!r}")
    if not 1 <= n <= proc.n:
        raise IndexOutOfRange(f"n={n} outside 1..{proc.n}")
    prod = unit(proc.product_space)
    for i in range(1, n + 1):
        prod = multiply(prod, exp_pointwise(scale(lam, proc.coin(i))))
    lhs = proc.lifted_T.apply(prod)
    base = unit(proc.product_space) + scale(math.expm1(lam), proc.success)
    rhs = unit(proc.product_space)
    for _ in range(n):
        rhs = multiply(rhs, base)
    return lhs, rhs


def lift_coin_function(proc: BernoulliProcess, coins: Sequence[int], table) -> Element:
    """Element depending only on the base block and the given coins.

    ``table[b, j]`` is the value on base block ``b`` when the selected coins
    read pattern ``j`` (little-endian in the order of ``coins``).  Elements
    built on disjoint coin sets are conditionally independent by
    construction.
    """
    coins = [int(c) for c in coins]
    if not coins:
        raise RieszError("need at least one coin")
    if len(set(coins)) != len(coins):
        raise RieszError("coins must be distinct")
    for c in coins:
        if not 1 <= c <= proc.n:
            raise IndexOutOfRange(f"coin index {c} outside 1..{proc.n}")
    table = np.asarray(table, dtype=float)
    want = (proc.base.block_count, 1 << len(coins))
    if table.shape != want:
        raise RieszError(f"table must have shape {want}, got {table.shape}")
    pattern = np.zeros(proc.product_space.atom_count, dtype=np.int64)
    for j, c in enumerate(coins):
        pattern |= proc.coin_bits[:, c - 1].astype(np.int64) << j
    block = proc.lifted_T.labels
    return Element(proc.product_space, table[block, pattern])


def lift_base(proc: BernoulliProcess, e: Element) -> Element:
    """Pull a base-space element back to the product carrier."""
    if e.space is not proc.base.space:
        raise SpaceMismatch("element is not on the base space")
    return Element(proc.product_space, e.values[proc.base_atom])
