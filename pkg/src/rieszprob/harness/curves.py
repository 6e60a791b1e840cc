"""Bound-versus-tail curves for a Bernoulli process, written as CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, List, Optional

import numpy as np

from ..errors import ConfigInvalid
from ..expectation import BernoulliProcess, make_bernoulli_process, make_cond_expectation, partial_sum
from ..inequalities import bennett_h, chernoff_rhs, gaussian_tail_rhs, tail_element
from ..lattice import Element, make_space, u_norm

HEADER = ("t", "tail", "chernoff", "bennett", "hoeffding")


def process_from_spec(spec: dict) -> BernoulliProcess:
    """Build a process from ``{"base_weights", "blocks", "p", "n"}``.

    ``p`` lists one success probability per block.  ``base_weights``
    defaults to a single atom and ``blocks`` to one block holding every atom.
    """
    try:
        weights = spec.get("base_weights", [1.0])
        space = make_space(weights)
        blocks = spec.get("blocks", [list(range(space.atom_count))])
        T = make_cond_expectation(space, blocks)
        p = spec["p"]
        if isinstance(p, (int, float)):
            p = [p] * T.block_count
        if len(p) != T.block_count:
            raise ConfigInvalid("p needs one probability per block")
        pe = Element(space, np.asarray(p, dtype=float)[T.labels])
        return make_bernoulli_process(T, pe, int(spec["n"]))
    except KeyError as exc:
        raise ConfigInvalid(f"process spec is missing {exc}") from exc


def load_process(path) -> BernoulliProcess:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read process spec {path}: {exc}") from exc
    return process_from_spec(spec)


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else repr(float(x))


def curve_rows(proc: BernoulliProcess, t_grid: Iterable[float]) -> List[tuple]:
    """One row per level ``t``; each column is the max atom of its element.

    Bennett and Hoeffding are applied to the centered sum ``S_n - n f`` at
    level ``x = t - n ||f||_u``, which dominates the event ``{S_n > t}`` on
    every block; like Chernoff they are left empty for ``t <= n ||f||_u``.
    """
    n = proc.n
    S = partial_sum(proc, n)
    T = proc.lifted_T
    f = proc.success
    nf = n * u_norm(f)
    rows = []
    for t in t_grid:
        t = float(t)
        tail = float(tail_element(T, S, t).values.max())
        cher = ben = hoef = None
        if t > nf:
            cher = float(chernoff_rhs(f, n, t).values.max())
            x = t - nf
            ben = math.exp(-nf * bennett_h(x / nf))
            hoef = gaussian_tail_rhs(x, n / 4.0)
        rows.append((t, tail, cher, ben, hoef))
    return rows


def emit_curves(proc: BernoulliProcess, t_grid: Iterable[float], out_path) -> str:
    """Write the curves CSV and return its text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for row in curve_rows(proc, t_grid):
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
