"""Tail elements and the Chernoff, Bennett and Hoeffding bounds.

Every check returns a :class:`~rieszprob.report.BoundReport` comparing the
conditional tail element ``T P_{(S - t u)^+} u`` against the bound.  The tail
element is the band-projection form of the conditional probability of the
event ``{S > t}``; on a finite carrier it is exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .calculus import exp_pointwise, phi_scalar, psi
from .errors import (
    HypothesisViolated,
    IndexOutOfRange,
    NotInBounds,
    NotInvertible,
    NotSubGaussianOnGrid,
    ParameterDomain,
    SpaceMismatch,
)
from .expectation import BernoulliProcess, CondExpectation, partial_sum
from .lattice import (
    Element,
    apply_projection,
    band_generated_by,
    multiply,
    pos_part,
    scale,
    u_norm,
    unit,
)
from .report import BoundReport

__all__ = [
    "BoundReport",
    "SubGaussianCert",
    "tail_element",
    "chernoff_rhs",
    "chernoff_chain",
    "chernoff_check",
    "bennett_h",
    "bennett_check",
    "subgaussian_check",
    "subgaussian_tail_check",
    "gaussian_tail_rhs",
    "hoeffding_sum_check",
    "bounded_subgaussian",
    "hoeffding_bounded_check",
    "nudge_off_atoms",
    "DEFAULT_LAMBDA_GRID",
]

DEFAULT_LAMBDA_GRID = (-5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0)


def tail_element(
    T: CondExpectation, S: Element, t: float, support_eps: float = 0.0, strict: bool = True
) -> Element:
    """Conditional tail ``T P_{(S - t u)^+} u``.

    With ``strict=False`` the closed event ``{S >= t}`` is used instead,
    i.e. ``T (u - P_{(t u - S)^+} u)``.
    """
    if S.space is not T.space:
        raise SpaceMismatch("S is not on the operator's space")
    u = unit(S.space)
    if strict:
        P = band_generated_by(pos_part(S - t), support_eps)
        return T.apply(apply_projection(P, u))
    P = band_generated_by(pos_part(t - S), support_eps)
    return T.apply(u - apply_projection(P, u))


def nudge_off_atoms(t: float, S: Element, step: float = 1e-9, max_steps: int = 100) -> float:
    """Move ``t`` up by ``step`` until it is not (numerically) an atom value of ``S``."""
    v = S.values
    for _ in range(max_steps):
        if not np.any(np.abs(v - t) <= 1e-12 * (1.0 + abs(t))):
            return t
        t += step
    return t


def _check_process_n(proc: BernoulliProcess, n: int) -> None:
    if not 1 <= n <= proc.n:
        raise IndexOutOfRange(f"n={n} outside 1..{proc.n}")


def chernoff_rhs(f: Element, n: int, t: float) -> Element:
    """``(n e ||f||_u / t)^t exp(-n f)``."""
    nf = n * u_norm(f)
    if not nf > 0:
        raise ParameterDomain("the success element must be nonzero")
    if not t > nf:
        raise ParameterDomain(f"need t > n||f||_u = {nf!r}, got t={t!r}")
    return scale(math.exp(t * (math.log(nf / t) + 1.0)), exp_pointwise(scale(-n, f)))


def chernoff_chain(proc: BernoulliProcess, n: int, t: float) -> List[Tuple[str, Element]]:
    """The successive upper bounds of the Chernoff argument, tightest first.

    With ``lam = log(t / (n ||f||_u))`` the chain is::

        tail <= e^{-lam t} T exp(lam S_n)
             =  e^{-lam t} (u + (e^lam - 1) f)^n
             <= e^{-lam t} exp(n (e^lam - 1) f)
             =  (n||f||/t)^t exp(t f / ||f|| - n f)
             <= (n||f||/t)^t exp(t u - n f)  ==  (n e ||f|| / t)^t exp(-n f)
    """
    _check_process_n(proc, n)
    f = proc.success
    fn = u_norm(f)
    nf = n * fn
    if not t > nf:
        raise ParameterDomain(f"need t > n||f||_u = {nf!r}, got t={t!r}")
    T = proc.lifted_T
    S = partial_sum(proc, n)
    lam = math.log(t / nf)
    damp = math.exp(-lam * t)
    u = unit(f.space)
    markov = scale(damp, T.apply(exp_pointwise(scale(lam, S))))
    base = u + scale(math.expm1(lam), f)
    prod = u
    for _ in range(n):
        prod = multiply(prod, base)
    product = scale(damp, prod)
    expbound = scale(damp, exp_pointwise(scale(n * math.expm1(lam), f)))
    coef = (nf / t) ** t
    optimized = scale(coef, exp_pointwise(scale(t / fn, f) - scale(n, f)))
    unit_form = scale(coef, exp_pointwise(t - scale(n, f)))
    return [
        ("tail", tail_element(T, S, t)),
        ("markov", markov),
        ("product", product),
        ("exp_bound", expbound),
        ("optimized", optimized),
        ("unit_form", unit_form),
        ("final", chernoff_rhs(f, n, t)),
    ]


def chernoff_check(
    proc: BernoulliProcess, n: int, t: float, tol: float = 1e-9, support_eps: float = 0.0
) -> BoundReport:
    """``T P_{(S_n - t u)^+} u <= (n e ||f||_u / t)^t exp(-n f)`` for ``t > n ||f||_u``."""
    _check_process_n(proc, n)
    rhs = chernoff_rhs(proc.success, n, t)
    lhs = tail_element(proc.lifted_T, partial_sum(proc, n), t, support_eps)
    return BoundReport.leq("chernoff", lhs, rhs, tol, n=n, t=t, f_norm=u_norm(proc.success))


def bennett_h(a: float) -> float:
    """``(1 + a) log(1 + a) - a``."""
    return (1.0 + a) * math.log1p(a) - a


def bennett_check(
    T: CondExpectation,
    fs: Sequence[Element],
    t: float,
    x: float,
    tol: float = 1e-9,
    support_eps: float = 0.0,
) -> Tuple[BoundReport, Optional[BoundReport]]:
    """Bennett's log-MGF bound and tail bound for ``S = sum (f_i - T f_i)``.

    Returns ``(mgf_report, tail_report)``; ``tail_report`` is ``None`` when
    ``v = sum T(f_i^2)`` has a zero atom, since the tail bound then needs an
    invertible ``v``.  The summands must satisfy ``f_i <= u``, without which
    the bound is false; independence is the caller's responsibility.
    """
    if not fs:
        raise ParameterDomain("need at least one summand")
    if not t > 0:
        raise ParameterDomain(f"t must be > 0, got {t!r}")
    if not x > 0:
        raise ParameterDomain(f"x must be > 0, got {x!r}")
    space = T.space
    S = Element(space, np.zeros(space.atom_count))
    v = S
    for i, f in enumerate(fs):
        if f.space is not space:
            raise SpaceMismatch(f"summand {i} is not on the operator's space")
        over = np.flatnonzero(f.values > 1.0)
        if over.size:
            a = int(over[0])
            raise HypothesisViolated(f"summand {i} exceeds u at atom {a}", atom=a)
        S = S + (f - T.apply(f))
        v = v + T.apply(multiply(f, f))
    vn = u_norm(v)
    params = dict(t=t, x=x, k=len(fs), v_norm=vn)
    mgf_rep = BoundReport.leq("bennett_mgf", psi(T, S, t), scale(phi_scalar(t), v), tol, **params)
    if np.any(v.values <= 0):
        return mgf_rep, None
    rhs = unit(space) * math.exp(-vn * bennett_h(x / vn))
    tail_rep = BoundReport.leq(
        "bennett_tail", tail_element(T, S, x, support_eps), rhs, tol, **dict(params)
    )
    return mgf_rep, tail_rep


@dataclass(frozen=True, eq=False)
class SubGaussianCert:
    """``X`` verified sub-Gaussian with parameter ``v`` on ``lambda_grid``."""

    element: Element
    parameter: Element
    lambda_grid: Tuple[float, ...]
    reports: Tuple[BoundReport, ...] = ()

    @property
    def parameter_norm(self) -> float:
        return u_norm(self.parameter)


def _require_positive_invertible(v: Element) -> None:
    bad = np.flatnonzero(~(v.values > 0))
    if bad.size:
        a = int(bad[0])
        raise NotInvertible(f"parameter must be positive invertible; atom {a} is {v.values[a]!r}", atom=a)


def subgaussian_check(
    T: CondExpectation,
    X: Element,
    v: Element,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    tol: float = 1e-9,
) -> SubGaussianCert:
    """Verify ``log T exp(lam (X - T X)) <= (lam^2 / 2) v`` for each grid ``lam``."""
    if X.space is not T.space or v.space is not T.space:
        raise SpaceMismatch("X and v must be on the operator's space")
    _require_positive_invertible(v)
    grid = tuple(float(lam) for lam in lambda_grid)
    if not grid:
        raise ParameterDomain("lambda grid is empty")
    Y = X - T.apply(X)
    reports = []
    for lam in grid:
        rep = BoundReport.leq("subgaussian", psi(T, Y, lam), scale(0.5 * lam * lam, v), tol, lam=lam)
        if not rep.holds:
            raise NotSubGaussianOnGrid(
                f"sub-Gaussian inequality fails at lambda={lam!r} (margin {rep.margin:.3e})",
                lam=lam,
                margin=rep.margin,
            )
        reports.append(rep)
    return SubGaussianCert(X, v, grid, tuple(reports))


def gaussian_tail_rhs(t: float, v_norm_sum: float) -> float:
    """``exp(-t^2 / (2 sum ||v_i||_u))``."""
    return math.exp(-(t * t) / (2.0 * v_norm_sum))


def subgaussian_tail_check(
    cert: SubGaussianCert, T: CondExpectation, t: float, tol: float = 1e-9, support_eps: float = 0.0
) -> BoundReport:
    """``T P_{(X - T X - t u)^+} u <= exp(-t^2 / (2 ||v||_u)) u``."""
    if not t > 0:
        raise ParameterDomain(f"t must be > 0, got {t!r}")
    X = cert.element
    Y = X - T.apply(X)
    vn = cert.parameter_norm
    rhs = unit(T.space) * gaussian_tail_rhs(t, vn)
    return BoundReport.leq(
        "subgaussian_tail", tail_element(T, Y, t, support_eps), rhs, tol, t=t, v_norm=vn
    )


def _centered_sum(T: CondExpectation, Xs: Sequence[Element]) -> Element:
    S = Element(T.space, np.zeros(T.space.atom_count))
    for i, X in enumerate(Xs):
        if X.space is not T.space:
            raise SpaceMismatch(f"X_{i} is not on the operator's space")
        S = S + (X - T.apply(X))
    return S


def hoeffding_sum_check(
    T: CondExpectation,
    Xs: Sequence[Element],
    vs: Sequence[Element],
    t: float,
    tol: float = 1e-9,
    lambda_grid: Optional[Sequence[float]] = DEFAULT_LAMBDA_GRID,
    support_eps: float = 0.0,
    strict: bool = True,
) -> BoundReport:
    """Tail of ``sum (X_i - T X_i)`` against ``exp(-t^2 / (2 sum ||v_i||_u))``.

    Each ``(X_i, v_i)`` is first certified on ``lambda_grid`` (pass ``None``
    to skip when certificates were already obtained).
    """
    if not Xs or len(Xs) != len(vs):
        raise ParameterDomain("need one parameter per summand and at least one summand")
    if not t > 0:
        raise ParameterDomain(f"t must be > 0, got {t!r}")
    if lambda_grid is not None:
        for X, v in zip(Xs, vs):
            subgaussian_check(T, X, v, lambda_grid, tol)
    else:
        for v in vs:
            _require_positive_invertible(v)
    total = sum(u_norm(v) for v in vs)
    S = _centered_sum(T, Xs)
    rhs = unit(T.space) * gaussian_tail_rhs(t, total)
    lhs = tail_element(T, S, t, support_eps, strict)
    return BoundReport.leq("hoeffding_sum", lhs, rhs, tol, t=t, v_norm_sum=total, k=len(Xs))


def _check_bounds(X: Element, a: float, b: float, i: int = 0) -> None:
    if not a < b:
        raise ParameterDomain(f"need a < b, got a={a!r}, b={b!r}")
    outside = np.flatnonzero((X.values < a) | (X.values > b))
    if outside.size:
        at = int(outside[0])
        raise NotInBounds(f"X_{i} leaves [{a}, {b}] at atom {at} (value {X.values[at]!r})", atom=at)


def bounded_subgaussian(
    T: CondExpectation,
    X: Element,
    a: float,
    b: float,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    tol: float = 1e-9,
) -> SubGaussianCert:
    """Certificate with parameter ``((b - a)^2 / 4) u`` for ``a u <= X <= b u``."""
    _check_bounds(X, a, b)
    v = unit(X.space) * ((b - a) ** 2 / 4.0)
    return subgaussian_check(T, X, v, lambda_grid, tol)


def hoeffding_bounded_check(
    T: CondExpectation,
    Xs: Sequence[Element],
    bounds: Sequence[Tuple[float, float]],
    t: float,
    tol: float = 1e-9,
    lambda_grid: Optional[Sequence[float]] = None,
    support_eps: float = 0.0,
    strict: bool = True,
) -> BoundReport:
    """Tail of ``sum (X_i - T X_i)`` against ``exp(-2 t^2 / sum (b_i - a_i)^2)``.

    The bound is evaluated as the sub-Gaussian sum bound with
    ``||v_i||_u = (b_i - a_i)^2 / 4``, which is the same number.
    """
    if not Xs or len(Xs) != len(bounds):
        raise ParameterDomain("need one (a, b) pair per summand")
    if not t > 0:
        raise ParameterDomain(f"t must be > 0, got {t!r}")
    quarter = 0.0
    for i, (X, (a, b)) in enumerate(zip(Xs, bounds)):
        _check_bounds(X, a, b, i)
        if lambda_grid is not None:
            bounded_subgaussian(T, X, a, b, lambda_grid, tol)
        quarter += (b - a) ** 2 / 4.0
    S = _centered_sum(T, Xs)
    rhs = unit(T.space) * gaussian_tail_rhs(t, quarter)
    lhs = tail_element(T, S, t, support_eps, strict)
    return BoundReport.leq(
        "hoeffding_bounded", lhs, rhs, tol, t=t, bounds=[list(ab) for ab in bounds], k=len(Xs)
    )
