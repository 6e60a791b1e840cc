"""Classical ground truth, computed without the lattice machinery.

Nothing here calls into :mod:`rieszprob.calculus` or
:mod:`rieszprob.expectation`; values are built from closed-form binomial
probabilities or by direct enumeration in plain Python so that a bug in the
main code path cannot reproduce itself in the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict

from .errors import NotAPartition, ParameterDomain
from .lattice import Element


@dataclass(frozen=True)
class OracleResult:
    per_block: Dict[int, float]

    def as_element(self, space, block_labels):
        """Block-constant element taking ``per_block[b]`` on atoms labelled ``b``."""
        return Element(space, [self.per_block[int(b)] for b in block_labels])


def _check_p_n(p: float, n: int) -> None:
    if not 0.0 < p < 1.0:
        raise ParameterDomain(f"p must lie in (0, 1), got {p!r}")
    if int(n) != n or n < 1:
        raise ParameterDomain(f"n must be a positive integer, got {n!r}")


def binomial_tail(p: float, n: int, t: float, strict: bool = True) -> float:
    """``P(Bin(n, p) > t)`` (or ``>= t`` with ``strict=False``).

    Terms are summed from the largest ``k`` down with :func:`math.fsum`.
    """
    _check_p_n(p, n)
    n = int(n)
    q = 1.0 - p
    terms = []
    for k in range(n, -1, -1):
        if (k > t) if strict else (k >= t):
            terms.append(math.comb(n, k) * p**k * q ** (n - k))
    return math.fsum(terms)


def classical_mgf(p: float, n: int, lam: float) -> float:
    """``E exp(lam Bin(n, p)) = (1 - p + p e^lam)^n``."""
    _check_p_n(p, n)
    return (1.0 + p * math.expm1(lam)) ** int(n)


def classical_mgf_enumerated(p: float, n: int, lam: float) -> float:
    """Same quantity summed over ``k`` instead of via the closed form."""
    _check_p_n(p, n)
    n = int(n)
    return math.fsum(
        math.comb(n, k) * p**k * (1.0 - p) ** (n - k) * math.exp(lam * k) for k in range(n + 1)
    )


def _kahan(values):
    total = 0.0
    c = 0.0
    for x in values:
        y = x - c
        s = total + y
        c = (s - total) - y
        total = s
    return total


def enumerate_expectation(weights, blocks, values) -> OracleResult:
    """Per-block weighted averages by direct enumeration.

    ``weights`` and ``values`` are plain sequences indexed by atom and
    ``blocks`` a list of atom-index collections.  Sums run in ascending
    atom order with Kahan compensation.
    """
    weights = [float(w) for w in weights]
    values = [float(v) for v in values]
    seen = set()
    out = {}
    for b, block in enumerate(blocks):
        atoms = sorted(int(a) for a in block)
        if not atoms:
            raise NotAPartition(f"block {b} is empty")
        for a in atoms:
            if a in seen or not 0 <= a < len(weights):
                raise NotAPartition(f"atom {a} repeated or off the carrier")
            seen.add(a)
        num = _kahan(weights[a] * values[a] for a in atoms)
        den = _kahan(weights[a] for a in atoms)
        out[b] = num / den
    if len(seen) != len(weights):
        raise NotAPartition("blocks do not cover the carrier")
    return OracleResult(out)


def bernoulli_tail_by_block(p_blocks, n: int, t: float, strict: bool = True) -> OracleResult:
    return OracleResult({b: binomial_tail(p, n, t, strict) for b, p in enumerate(p_blocks)})


def bernoulli_mgf_by_block(p_blocks, n: int, lam: float) -> OracleResult:
    return OracleResult({b: classical_mgf(p, n, lam) for b, p in enumerate(p_blocks)})


def two_point_log_mgf(lo: float, hi: float, p_hi: float, lam: float) -> float:
    """``log E exp(lam Y)`` for ``Y`` taking ``hi`` w.p. ``p_hi`` and ``lo`` otherwise."""
    return math.log((1.0 - p_hi) * math.exp(lam * lo) + p_hi * math.exp(lam * hi))
