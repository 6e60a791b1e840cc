"""Structured verdicts for inequality and identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np

from .lattice import Element

Value = Union[Element, float]


def _as_array(v: Value) -> np.ndarray:
    if isinstance(v, Element):
        return v.values
    return np.atleast_1d(np.asarray(v, dtype=float))


@dataclass(frozen=True)
class BoundReport:
    """Outcome of comparing ``lhs`` against ``rhs``.

    ``kind == "leq"`` checks ``lhs <= rhs`` and ``margin`` is the smallest
    atomwise ``rhs - lhs``.  ``kind == "eq"`` checks ``lhs == rhs`` and
    ``margin`` is ``-||lhs - rhs||_u``.  In both cases
    ``holds == (margin >= -tol * (1 + ||rhs||_u))``.  ``kind == "rel"`` is
    an atomwise relative comparison, ``margin = -max |lhs - rhs| / scale``
    and ``holds == (margin >= -tol)``.
    """

    name: str
    lhs: Value
    rhs: Value
    margin: float
    holds: bool
    kind: str = "leq"
    atom: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def tol(self) -> float:
        return self.params["tol"]

    @property
    def slack(self) -> float:
        if self.kind == "rel":
            return self.tol
        return self.tol * (1.0 + float(np.max(np.abs(_as_array(self.rhs)))))

    @classmethod
    def leq(cls, name: str, lhs: Value, rhs: Value, tol: float, **params) -> "BoundReport":
        lv, rv = np.broadcast_arrays(_as_array(lhs), _as_array(rhs))
        diff = rv - lv
        atom = int(np.argmin(diff))
        margin = float(diff[atom])
        slack = tol * (1.0 + float(np.max(np.abs(rv))))
        params["tol"] = tol
        return cls(name, lhs, rhs, margin, bool(margin >= -slack), "leq", atom, params)

    @classmethod
    def eq(cls, name: str, lhs: Value, rhs: Value, tol: float, **params) -> "BoundReport":
        lv, rv = np.broadcast_arrays(_as_array(lhs), _as_array(rhs))
        err = np.abs(lv - rv)
        atom = int(np.argmax(err))
        margin = -float(err[atom])
        slack = tol * (1.0 + float(np.max(np.abs(rv))))
        params["tol"] = tol
        return cls(name, lhs, rhs, margin, bool(margin >= -slack), "eq", atom, params)

    @classmethod
    def rel(cls, name: str, lhs: Value, rhs: Value, tol: float, scale=None, **params) -> "BoundReport":
        """Atomwise ``|lhs - rhs| <= tol * scale``; ``scale`` defaults to ``|rhs|``."""
        lv, rv = np.broadcast_arrays(_as_array(lhs), _as_array(rhs))
        sc = np.abs(rv) if scale is None else np.broadcast_to(_as_array(scale), rv.shape)
        with np.errstate(over="ignore"):
            err = np.abs(lv - rv) / np.maximum(sc, np.finfo(float).tiny)
        err = np.where(lv == rv, 0.0, err)
        atom = int(np.argmax(err))
        margin = -float(err[atom])
        params["tol"] = tol
        return cls(name, lhs, rhs, margin, bool(margin >= -tol), "rel", atom, params)

    def normalized_margin(self) -> float:
        """Margin in units of the allowed slack (``>= -1`` iff the check holds)."""
        return self.margin / self.slack if self.slack > 0 else self.margin

    def at_atom(self):
        """``(lhs, rhs)`` scalars at the atom that decided the verdict."""
        lv, rv = np.broadcast_arrays(_as_array(self.lhs), _as_array(self.rhs))
        return float(lv[self.atom]), float(rv[self.atom])

    def to_dict(self) -> Dict[str, Any]:
        lhs_at, rhs_at = self.at_atom()
        return {
            "name": self.name,
            "kind": self.kind,
            "holds": self.holds,
            "margin": self.margin,
            "atom": self.atom,
            "lhs_at_atom": lhs_at,
            "rhs_at_atom": rhs_at,
            "params": _jsonable(self.params),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Element):
        return obj.values.tolist()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
