"""Finite-dimensional Riesz space of real functions on a weighted carrier.

A :class:`Space` is a finite set of atoms carrying strictly positive
probability weights.  An :class:`Element` is a real function on those atoms.
With atomwise arithmetic the elements form a Dedekind complete f-algebra
whose unit ``u`` is the constant one function, so the abstract representation
onto ``C(X)`` is simply the identity here and every order limit is an exact
maximum over atoms.

All objects are immutable: arrays are stored read-only and every operation
returns a fresh value.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    EmptyCarrier,
    NegativeTolerance,
    NonPositiveWeight,
    NotInvertible,
    RieszError,
    SpaceMismatch,
)

__all__ = [
    "Space",
    "Element",
    "BandProjection",
    "make_space",
    "element",
    "unit",
    "zero",
    "add",
    "subtract",
    "scale",
    "multiply",
    "sup",
    "inf",
    "pos_part",
    "neg_part",
    "absolute",
    "u_norm",
    "order_leq",
    "band_generated_by",
    "apply_projection",
    "invert",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class Space:
    """Finite carrier with strictly positive probability weights.

    Spaces compare by identity: two elements are compatible only when they
    reference the very same ``Space`` object.
    """

    __slots__ = ("_weights", "_labels")

    def __init__(self, weights, atom_labels: Optional[Sequence] = None):
        w = np.asarray(weights, dtype=float).ravel()
        if w.size == 0:
            raise EmptyCarrier("a space needs at least one atom")
        if not np.all(np.isfinite(w)):
            raise NonPositiveWeight("weights must be finite")
        bad = np.flatnonzero(w <= 0)
        if bad.size:
            raise NonPositiveWeight(f"weight of atom {int(bad[0])} is {w[bad[0]]!r}, must be > 0")
        if abs(w.sum() - 1.0) > 1e-12:
            raise NonPositiveWeight(f"weights sum to {w.sum()!r}, expected 1")
        if atom_labels is not None:
            atom_labels = tuple(atom_labels)
            if len(atom_labels) != w.size:
                raise RieszError("one label per atom required")
        self._weights = _frozen(w)
        self._labels = atom_labels

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def atom_count(self) -> int:
        return int(self._weights.size)

    @property
    def atom_labels(self):
        return self._labels

    def __len__(self):
        return self.atom_count

    def __repr__(self):
        return f"Space(atom_count={self.atom_count})"

    def element(self, values) -> "Element":
        return Element(self, values)

    def unit(self) -> "Element":
        return unit(self)

    def zero(self) -> "Element":
        return zero(self)

    def constant(self, c: float) -> "Element":
        return Element(self, np.full(self.atom_count, float(c)))


def make_space(weights: Iterable[float], atom_labels: Optional[Sequence] = None) -> Space:
    """Build a :class:`Space`, normalizing ``weights`` to sum to one.

    >>> make_space([2, 6]).weights
    array([0.25, 0.75])
    """
    w = np.asarray(list(weights), dtype=float).ravel()
    if w.size == 0:
        raise EmptyCarrier("a space needs at least one atom")
    bad = np.flatnonzero(~(w > 0))
    if bad.size:
        raise NonPositiveWeight(f"weight of atom {int(bad[0])} is {w[bad[0]]!r}, must be > 0")
    if not np.all(np.isfinite(w)):
        raise NonPositiveWeight("weights must be finite")
    return Space(w / w.sum(), atom_labels)


def _check_same(*items) -> Space:
    space = items[0].space
    for it in items[1:]:
        if it.space is not space:
            raise SpaceMismatch("operands live on different spaces")
    return space


class Element:
    """Real-valued function on the atoms of a :class:`Space`."""

    __slots__ = ("_space", "_values")
    __array_priority__ = 1000

    def __init__(self, space: Space, values):
        if not isinstance(space, Space):
            raise TypeError("space must be a Space")
        v = np.asarray(values, dtype=float)
        if v.ndim == 0:
            v = np.full(space.atom_count, float(v))
        v = v.ravel()
        if v.size != space.atom_count:
            raise RieszError(f"expected {space.atom_count} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise RieszError("element values must be finite")
        self._space = space
        self._values = _frozen(v)

    @property
    def space(self) -> Space:
        return self._space

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __repr__(self):
        return f"Element({np.array2string(self._values, precision=6, threshold=8)})"

    def __len__(self):
        return self._values.size

    def __iter__(self):
        return iter(self._values.tolist())

    # arithmetic sugar; scalars are read as multiples of the unit
    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Element):
            _check_same(self, other)
            return other._values
        return float(other)

    def __add__(self, other):
        return Element(self._space, self._values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Element(self._space, self._values - self._coerce(other))

    def __rsub__(self, other):
        return Element(self._space, self._coerce(other) - self._values)

    def __mul__(self, other):
        return Element(self._space, self._values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Element):
            return multiply(self, invert(other))
        return Element(self._space, self._values / float(other))

    def __neg__(self):
        return Element(self._space, -self._values)

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise RieszError("only non-negative integer powers are defined")
        return Element(self._space, self._values ** int(k))

    def __abs__(self):
        return absolute(self)

    def __or__(self, other):
        return sup(self, other)

    def __and__(self, other):
        return inf(self, other)

    @property
    def pos(self) -> "Element":
        return pos_part(self)

    @property
    def neg(self) -> "Element":
        return neg_part(self)

    def norm(self) -> float:
        return u_norm(self)

    def allclose(self, other: "Element", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        _check_same(self, other)
        return bool(np.allclose(self._values, other._values, rtol=rtol, atol=atol))


def element(space: Space, values) -> Element:
    return Element(space, values)


def unit(space: Space) -> Element:
    """The algebra unit ``u`` (constant one)."""
    return Element(space, np.ones(space.atom_count))


def zero(space: Space) -> Element:
    return Element(space, np.zeros(space.atom_count))


def add(f: Element, g: Element) -> Element:
    _check_same(f, g)
    return Element(f.space, f.values + g.values)


def subtract(f: Element, g: Element) -> Element:
    _check_same(f, g)
    return Element(f.space, f.values - g.values)


def scale(c: float, f: Element) -> Element:
    return Element(f.space, float(c) * f.values)


def multiply(f: Element, g: Element) -> Element:
    """f-algebra product (atomwise)."""
    _check_same(f, g)
    return Element(f.space, f.values * g.values)


def sup(f: Element, g: Element) -> Element:
    _check_same(f, g)
    return Element(f.space, np.maximum(f.values, g.values))


def inf(f: Element, g: Element) -> Element:
    _check_same(f, g)
    return Element(f.space, np.minimum(f.values, g.values))


def pos_part(f: Element) -> Element:
    return Element(f.space, np.maximum(f.values, 0.0))


def neg_part(f: Element) -> Element:
    return Element(f.space, np.maximum(-f.values, 0.0))


def absolute(f: Element) -> Element:
    return Element(f.space, np.abs(f.values))


def u_norm(f: Element) -> float:
    """Gauge norm ``inf{b : |f| <= b u}``, which is the max of ``|f|``."""
    return float(np.max(np.abs(f.values)))


def order_leq(f: Element, g: Element, tol: float = 0.0) -> bool:
    """``f <= g`` atomwise with slack ``tol * (1 + |g|)``.

    ``tol=0`` is the exact lattice order.
    """
    if tol < 0:
        raise NegativeTolerance(f"tol must be >= 0, got {tol!r}")
    _check_same(f, g)
    gv = g.values
    return bool(np.all(f.values <= gv + tol * (1.0 + np.abs(gv))))


class BandProjection:
    """Band projection on a finite carrier: multiplication by an indicator."""

    __slots__ = ("_space", "_mask")

    def __init__(self, space: Space, support):
        mask = np.zeros(space.atom_count, dtype=bool)
        support = np.asarray(support)
        if support.dtype == bool:
            if support.size != space.atom_count:
                raise RieszError("boolean support must have one entry per atom")
            mask[:] = support
        elif support.size:
            idx = support.astype(int).ravel()
            if idx.min() < 0 or idx.max() >= space.atom_count:
                raise RieszError("support index out of range")
            mask[idx] = True
        mask.setflags(write=False)
        self._space = space
        self._mask = mask

    @classmethod
    def full(cls, space: Space) -> "BandProjection":
        return cls(space, np.ones(space.atom_count, dtype=bool))

    @classmethod
    def empty(cls, space: Space) -> "BandProjection":
        return cls(space, np.zeros(space.atom_count, dtype=bool))

    @property
    def space(self) -> Space:
        return self._space

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def support(self) -> frozenset:
        return frozenset(np.flatnonzero(self._mask).tolist())

    def indicator(self) -> Element:
        """``P u``."""
        return Element(self._space, self._mask.astype(float))

    def __call__(self, f: Element) -> Element:
        return apply_projection(self, f)

    def __eq__(self, other):
        if not isinstance(other, BandProjection):
            return NotImplemented
        return other._space is self._space and bool(np.array_equal(self._mask, other._mask))

    def __hash__(self):
        return hash((id(self._space), self._mask.tobytes()))

    def __repr__(self):
        return f"BandProjection(support={sorted(self.support)})"


def band_generated_by(g: Element, support_eps: float = 0.0) -> BandProjection:
    """Projection onto the band generated by ``g``.

    The support is ``{x : |g_x| > support_eps * max(1, ||g||_u)}``.
    """
    if support_eps < 0:
        raise NegativeTolerance("support_eps must be >= 0")
    a = np.abs(g.values)
    thresh = support_eps * max(1.0, float(a.max()))
    return BandProjection(g.space, a > thresh)


def apply_projection(P: BandProjection, f: Element) -> Element:
    if P.space is not f.space:
        raise SpaceMismatch("projection and element live on different spaces")
    return Element(f.space, np.where(P.mask, f.values, 0.0))


def invert(f: Element, inv_eps: float = 0.0) -> Element:
    """Atomwise reciprocal; raises :class:`NotInvertible` if some ``|f_x| <= inv_eps``."""
    if inv_eps < 0:
        raise NegativeTolerance("inv_eps must be >= 0")
    bad = np.flatnonzero(np.abs(f.values) <= inv_eps)
    if bad.size:
        i = int(bad[0])
        raise NotInvertible(f"atom {i} has value {f.values[i]!r}", atom=i)
    return Element(f.space, 1.0 / f.values)
