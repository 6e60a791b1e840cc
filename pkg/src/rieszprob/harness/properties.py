"""Checkable statements, one function per property id.

A property takes a trial RNG and the suite config and returns an instance
descriptor together with the list of :class:`BoundReport` it produced.  A
trial passes when every report holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from .. import oracle
from ..calculus import (
    exp_pointwise,
    exp_series,
    log_element,
    mgf,
    phi_map,
    secant_z,
)
from ..expectation import (
    check_T_independent_elements,
    check_T_independent_projections,
    lemma_indep_product,
    make_cond_expectation,
    partial_sum,
    range_contains,
)
from ..inequalities import (
    bennett_check,
    bounded_subgaussian,
    chernoff_chain,
    chernoff_check,
    hoeffding_bounded_check,
    hoeffding_sum_check,
    nudge_off_atoms,
    subgaussian_tail_check,
    tail_element,
)
from ..lattice import (
    BandProjection,
    Element,
    absolute,
    apply_projection,
    band_generated_by,
    inf,
    invert,
    make_space,
    multiply,
    neg_part,
    order_leq,
    pos_part,
    scale,
    sup,
    u_norm,
    unit,
)
from ..report import BoundReport
from .config import SuiteConfig
from .instances import (
    gen_family,
    gen_process,
    random_cond_expectation,
    random_element,
    random_partition,
    random_space,
)

Result = Tuple[dict, List[BoundReport]]

LAMBDAS_MGF = (0.25, 0.5, 1.0, 2.0)
BENNETT_TS = (0.25, 0.5, 1.0, 2.0)
HOEFFDING_LAMBDAS = (-5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0)
FACTOR_TS = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class Property:
    id: str
    statement: str
    formula: str
    run: Callable[[np.random.Generator, SuiteConfig], Result]


PROPERTIES: Dict[str, Property] = {}


def prop(pid: str, statement: str, formula: str):
    def deco(fn):
        PROPERTIES[pid] = Property(pid, statement, formula, fn)
        return fn

    return deco


def flag(name: str, ok: bool, **params) -> BoundReport:
    return BoundReport.eq(name, float(bool(ok)), 1.0, 0.0, **params)


def _abs_sum(*es: Element) -> np.ndarray:
    return sum(np.abs(e.values) for e in es)


@prop(
    "algebra_lattice_laws",
    "f-algebra and Riesz space laws on the finite carrier",
    "fg = gf, (fg)h = f(gh), f(g+h) = fg + fh, fu = f; f = f+ - f-, |f| = f+ + f-, "
    "f v g + f ^ g = f + g; ||.||_u is a submultiplicative norm and the least b with |f| <= b u",
)
def algebra_lattice_laws(rng, cfg) -> Result:
    space = random_space(rng, 64)
    f, g, h = (random_element(rng, space) for _ in range(3))
    u = unit(space)
    tol = 1e-12
    reps = [
        BoundReport.rel("commutativity", multiply(f, g), multiply(g, f), tol),
        BoundReport.rel(
            "associativity", multiply(multiply(f, g), h), multiply(f, multiply(g, h)), tol,
            scale=np.abs(f.values * g.values * h.values),
        ),
        BoundReport.rel(
            "distributivity", multiply(f, g + h), multiply(f, g) + multiply(f, h), tol,
            scale=np.abs(f.values) * _abs_sum(g, h),
        ),
        BoundReport.rel("additive_associativity", (f + g) + h, f + (g + h), tol, scale=_abs_sum(f, g, h)),
        BoundReport.eq("unit_law", multiply(f, u), f, 0.0),
        BoundReport.eq("positive_negative_split", pos_part(f) - neg_part(f), f, 0.0),
        BoundReport.eq("modulus_split", pos_part(f) + neg_part(f), absolute(f), 0.0),
        BoundReport.eq("sup_inf_sum", sup(f, g) + inf(f, g), f + g, 0.0),
        BoundReport.eq("sup_idempotent", sup(f, f), f, 0.0),
        BoundReport.leq("norm_triangle", u_norm(f + g), u_norm(f) + u_norm(g), tol),
        BoundReport.leq("norm_submultiplicative", u_norm(multiply(f, g)), u_norm(f) * u_norm(g), tol),
    ]
    c = float(rng.uniform(-3, 3))
    reps.append(BoundReport.rel("norm_homogeneity", u_norm(scale(c, f)), abs(c) * u_norm(f), tol))
    beta = u_norm(f)
    reps.append(flag("norm_attained", order_leq(absolute(f), scale(beta, u), 0.0)))
    reps.append(flag("norm_least", beta == 0 or not order_leq(absolute(f), scale(beta * (1 - 1e-6), u), 0.0)))

    # elements with genuine zeros so band supports are proper subsets
    zmask = rng.random(space.atom_count) < 0.3
    gz = Element(space, np.where(zmask, 0.0, g.values))
    P = band_generated_by(gz, 0.0)
    reps.append(BoundReport.eq("band_fixes_generator", apply_projection(P, gz), gz, 0.0))
    extra = rng.random(space.atom_count) < 0.5
    Q = BandProjection(space, P.mask | extra)
    reps.append(flag("band_minimal", P.support <= Q.support and bool(np.array_equal(apply_projection(Q, gz).values, gz.values))))
    if P.support:
        drop = min(P.support)
        R = BandProjection(space, P.mask & (np.arange(space.atom_count) != drop))
        reps.append(flag("band_strictly_smaller_fails", not np.array_equal(apply_projection(R, gz).values, gz.values)))
    Pf = apply_projection(Q, f)
    reps.append(BoundReport.eq("projection_idempotent", apply_projection(Q, Pf), Pf, 0.0))
    upper = f + absolute(h)
    reps.append(flag("projection_monotone", order_leq(apply_projection(Q, f), apply_projection(Q, upper), 0.0)))
    reps.append(flag("projection_dominated", order_leq(apply_projection(Q, absolute(f)), absolute(f), 0.0)))
    nz = Element(space, np.where(np.abs(f.values) < 1e-3, 1.0, f.values))
    reps.append(BoundReport.rel("inverse", multiply(nz, invert(nz)), u, tol))
    return {"atoms": space.atom_count}, reps


def _exp_pair(rng):
    space = random_space(rng, 64)
    return space, random_element(rng, space, 5.0), random_element(rng, space, 5.0)


@prop(
    "exp_series_agreement",
    "the exponential power series converges to the pointwise exponential",
    "|sum_{k<=n} x^k/k! - exp(x)| <= eps u",
)
def exp_series_agreement(rng, cfg) -> Result:
    space, x, _ = _exp_pair(rng)
    return {"atoms": space.atom_count}, [BoundReport.rel("series_vs_pointwise", exp_series(x), exp_pointwise(x), 1e-12)]


@prop(
    "exp_homomorphism",
    "the exponential is a positive homomorphism onto invertible elements",
    "exp(x + y) = exp(x) exp(y); exp(x) >= 0; exp(x) exp(-x) = u",
)
def exp_homomorphism(rng, cfg) -> Result:
    space, x, y = _exp_pair(rng)
    ex = exp_pointwise(x)
    return {"atoms": space.atom_count}, [
        BoundReport.rel("homomorphism", exp_pointwise(x + y), multiply(ex, exp_pointwise(y)), 1e-11),
        flag("positive", bool(np.all(ex.values > 0))),
        BoundReport.rel("inverse", multiply(ex, exp_pointwise(-x)), unit(space), 1e-12),
    ]


@prop(
    "secant_identity",
    "exp(x) - exp(y) factors through a positive invertible secant element",
    "exp(x) - exp(y) = z (x - y), z >> 0",
)
def secant_identity(rng, cfg) -> Result:
    space, x, y = _exp_pair(rng)
    # a few coincident atoms exercise the equal branch
    tie = rng.random(space.atom_count) < 0.1
    y = Element(space, np.where(tie, x.values, y.values))
    z = secant_z(x, y)
    lhs = multiply(z, x - y)
    rhs = exp_pointwise(x) - exp_pointwise(y)
    return {"atoms": space.atom_count}, [
        BoundReport.rel("secant", lhs, rhs, 1e-10),
        flag("secant_positive", bool(np.all(z.values > 0))),
    ]


@prop(
    "band_equality",
    "x - y and exp(lam x) - exp(lam y) generate the same band for lam > 0",
    "{(x - y)+}^dd = {(exp(lam x) - exp(lam y))+}^dd",
)
def band_equality(rng, cfg) -> Result:
    space, x, y = _exp_pair(rng)
    lam = float(rng.uniform(0.01, 3.0))
    b1 = band_generated_by(pos_part(x - y), 0.0)
    b2 = band_generated_by(pos_part(exp_pointwise(scale(lam, x)) - exp_pointwise(scale(lam, y))), 0.0)
    # integer-valued S against a non-integer level, as in the tail events
    S = Element(space, rng.integers(0, 13, size=space.atom_count).astype(float))
    t = float(rng.integers(0, 12)) + float(rng.uniform(0.05, 0.95))
    b3 = band_generated_by(pos_part(S - t), 0.0)
    b4 = band_generated_by(pos_part(exp_pointwise(scale(lam, S)) - math.exp(lam * t)), 0.0)
    return {"atoms": space.atom_count, "lambda": lam, "t": t}, [
        flag("band_equal", b1 == b2),
        flag("tail_band_equal", b3 == b4),
    ]


@prop(
    "one_plus_x_le_exp",
    "the unit plus x is dominated by the exponential",
    "u + x <= exp(x)",
)
def one_plus_x_le_exp(rng, cfg) -> Result:
    space, x, _ = _exp_pair(rng)
    return {"atoms": space.atom_count}, [BoundReport.leq("one_plus_x", unit(space) + x, exp_pointwise(x), 1e-12)]


@prop(
    "log_properties",
    "the logarithm of positive invertible elements inverts the exponential and is additive",
    "log(fg) = log f + log g; log exp x = x; exp log f = f",
)
def log_properties(rng, cfg) -> Result:
    space, x, y = _exp_pair(rng)
    f, g = exp_pointwise(x), exp_pointwise(y)
    return {"atoms": space.atom_count}, [
        BoundReport.eq("log_product", log_element(multiply(f, g)), log_element(f) + log_element(g), 1e-12),
        BoundReport.eq("log_exp", log_element(f), x, 1e-12),
        BoundReport.rel("exp_log", exp_pointwise(log_element(f)), f, 1e-12),
    ]


@prop(
    "phi_domination",
    "Phi(t f) <= f^2 Phi(t u) for f <= u and t > 0",
    "Phi(f) = exp(f) - f - u;  Phi(t f) <= f^2 Phi(t u)",
)
def phi_domination(rng, cfg) -> Result:
    space = random_space(rng, 64)
    f = Element(space, rng.uniform(-10.0, 1.0, size=space.atom_count))
    if rng.random() < 0.5:
        f = Element(space, np.where(rng.random(space.atom_count) < 0.2, 1.0, f.values))
    t = float(rng.uniform(1e-3, 5.0))
    lhs = phi_map(scale(t, f))
    rhs = multiply(multiply(f, f), phi_map(scale(t, unit(space))))
    return {"atoms": space.atom_count, "t": t}, [
        BoundReport.leq("phi_domination", lhs, rhs, 1e-9, t=t),
        flag("phi_nonnegative", bool(np.all(phi_map(scale(t, f)).values >= 0))),
    ]


@prop(
    "conditional_expectation_axioms",
    "block averaging is a strictly positive conditional expectation",
    "Tu = u; T^2 = T; f >= 0 => Tf >= 0; f > 0 on a block => Tf > 0 there; T(gf) = g Tf for g in R(T)",
)
def conditional_expectation_axioms(rng, cfg) -> Result:
    space = random_space(rng, 64)
    blocks = random_partition(rng, space.atom_count, 8)
    T = make_cond_expectation(space, blocks)
    u = unit(space)
    f = random_element(rng, space)
    Tf = T.apply(f)
    fpos = Element(space, np.where(rng.random(space.atom_count) < 0.6, 0.0, np.abs(f.values)))
    Tfpos = T.apply(fpos)
    touched = np.unique(T.labels[fpos.values > 0])
    strict_ok = all(np.all(Tfpos.values[T.labels == b] > 0) for b in touched)
    g = T.apply(random_element(rng, space))
    ref = oracle.enumerate_expectation(space.weights.tolist(), blocks, f.values.tolist())
    return {"atoms": space.atom_count, "blocks": len(blocks)}, [
        BoundReport.eq("unit_fixed", T.apply(u), u, 0.0),
        BoundReport.eq("idempotent", T.apply(Tf), Tf, 0.0),
        flag("positive", order_leq(Element(space, np.zeros(space.atom_count)), Tfpos, 0.0)),
        flag("strictly_positive", strict_ok),
        flag("range", range_contains(T, Tf, 0.0)),
        BoundReport.eq("averaging", T.apply(multiply(g, f)), multiply(g, Tf), 1e-12),
        BoundReport.eq("enumeration_oracle", Tf, ref.as_element(space, T.labels), 1e-13),
    ]


@prop(
    "mgf_invertible",
    "T(exp f) is invertible, bounded below by exp(min f) u",
    "T exp(f) >= exp(alpha) u where f >= alpha u",
)
def mgf_invertible(rng, cfg) -> Result:
    T = random_cond_expectation(rng, cfg, 64)
    f = random_element(rng, T.space, 5.0)
    M = T.apply(exp_pointwise(f))
    floor = unit(T.space) * math.exp(float(f.values.min()))
    return {"atoms": T.space.atom_count}, [
        BoundReport.leq("lower_bound", floor, M, 1e-12),
        BoundReport.rel("invertible", multiply(M, invert(M)), unit(T.space), 1e-12),
    ]


@prop(
    "bernoulli_invariants",
    "the product construction yields a Bernoulli process",
    "T P_i u = f; T(P_i1 u ... P_ik u) = f^k; T P Q u = T P u T Q u for distinct coins",
)
def bernoulli_invariants(rng, cfg) -> Result:
    proc = gen_process(rng, cfg)
    T, f = proc.lifted_T, proc.success
    reps = [BoundReport.eq("coin_mean", T.apply(proc.coin(i)), f, 1e-13, coin=i) for i in range(1, proc.n + 1)]
    k = int(rng.integers(1, proc.n + 1))
    subset = sorted((rng.permutation(proc.n)[:k] + 1).tolist())
    prod = unit(proc.product_space)
    for i in subset:
        prod = multiply(prod, proc.coin(i))
    reps.append(BoundReport.eq("subset_product", T.apply(prod), f ** len(subset), 1e-12, subset=subset))
    if proc.n >= 2:
        i, j = (rng.permutation(proc.n)[:2] + 1).tolist()
        reps.append(check_T_independent_projections(T, proc.projections[i - 1], proc.projections[j - 1], 1e-12))
    # atom weight = base weight * prod of coin probabilities
    pb = proc.p_base.values[proc.base_atom]
    heads = proc.coin_bits.sum(axis=1)
    expect = proc.base.space.weights[proc.base_atom] * pb**heads * (1 - pb) ** (proc.n - heads)
    reps.append(BoundReport.rel("product_weights", proc.product_space.weights, expect / expect.sum(), 1e-12))
    return proc.descriptor(), reps


def _independent_pair(rng, cfg):
    fam = gen_family(rng, cfg, "hoeffding", max_members=2)
    while len(fam.members) < 2:
        fam = gen_family(rng, cfg, "hoeffding", max_members=2)
    return fam


@prop(
    "independent_product_expectation",
    "conditionally independent elements have multiplicative expectations",
    "T(fg) = Tf Tg",
)
def independent_product_expectation(rng, cfg) -> Result:
    fam = _independent_pair(rng, cfg)
    f, g = fam.members[:2]
    T = fam.T
    return fam.descriptor(), [BoundReport.eq("product_expectation", T.apply(multiply(f, g)), multiply(T.apply(f), T.apply(g)), 1e-10)]


@prop(
    "moment_mgf_factorization",
    "independent elements have factorizing moments and moment generating functions",
    "T(f^n g^m) = T(f^n) T(g^m) for n, m <= 4;  M_{f+g}(t) = M_f(t) M_g(t)",
)
def moment_mgf_factorization(rng, cfg) -> Result:
    fam = _independent_pair(rng, cfg)
    f, g = fam.members[:2]
    rep = check_T_independent_elements(fam.T, f, g, 4, FACTOR_TS, 1e-10)
    # a projection is not independent of itself: T(P u) = u/2 but T(P u)^2 = u/4
    space = make_space([0.5, 0.5])
    T1 = make_cond_expectation(space, [[0, 1]])
    P = BandProjection(space, [0])
    selfdep = check_T_independent_projections(T1, P, P, 1e-10)
    return fam.descriptor(), [rep, flag("self_dependence_detected", not selfdep.holds)]


@prop(
    "tail_oracle",
    "the tail element is the conditional binomial tail",
    "T P_{(S_n - t u)+} u = P(Bin(n, p_B) > t) on base block B",
)
def tail_oracle(rng, cfg) -> Result:
    proc = gen_process(rng, cfg)
    n = int(rng.integers(1, proc.n + 1))
    S = partial_sum(proc, n)
    T = proc.lifted_T
    reps = []
    ts = [-0.5] + [k + 0.5 for k in range(n + 1)] + [float(k) for k in range(n + 1)]
    for t in ts:
        ref = oracle.bernoulli_tail_by_block(proc.p_blocks.tolist(), n, t)
        reps.append(BoundReport.eq("tail_vs_binomial", tail_element(T, S, t), ref.as_element(proc.product_space, T.labels), 1e-12, n=n, t=t))
    return proc.descriptor(), reps


@prop(
    "bernoulli_mgf",
    "the MGF of a Bernoulli sum is the product of coin MGFs",
    "T prod_i exp(lam P_i u) = (u + (e^lam - 1) f)^n = (1 - p + p e^lam)^n per block",
)
def bernoulli_mgf(rng, cfg) -> Result:
    proc = gen_process(rng, cfg)
    n = proc.n
    S = partial_sum(proc, n)
    T = proc.lifted_T
    reps = []
    for lam in LAMBDAS_MGF:
        lhs, rhs = lemma_indep_product(proc, lam, n)
        ref = oracle.bernoulli_mgf_by_block(proc.p_blocks.tolist(), n, lam).as_element(proc.product_space, T.labels)
        reps.append(BoundReport.eq("product_formula", lhs, rhs, 1e-10, lam=lam))
        reps.append(BoundReport.eq("mgf_vs_classical", mgf(T, S, lam), ref, 1e-10, lam=lam))
    return proc.descriptor(), reps


def chernoff_grid(n: int, fnorm: float, size: int) -> List[float]:
    lo = n * fnorm
    return [lo + (n - lo) * k / size for k in range(1, size + 1)]


@prop(
    "chernoff",
    "Chernoff inequality for a Bernoulli process",
    "T P_{(S_n - t u)+} u <= (n e ||f||_u / t)^t exp(-n f) for t > n ||f||_u",
)
def chernoff(rng, cfg) -> Result:
    proc = gen_process(rng, cfg)
    n = proc.n
    S = partial_sum(proc, n)
    fn = u_norm(proc.success)
    reps = []
    for t in chernoff_grid(n, fn, cfg.t_grid_size):
        t = nudge_off_atoms(t, S)
        reps.append(chernoff_check(proc, n, t, cfg.tol))
    return proc.descriptor(), reps


@prop(
    "chernoff_chain",
    "each step of the Chernoff argument is a valid upper bound",
    "tail <= e^{-lam t} T exp(lam S_n) = e^{-lam t}(u + (e^lam - 1) f)^n <= ... <= (n e ||f|| / t)^t exp(-n f)",
)
def chernoff_chain_prop(rng, cfg) -> Result:
    proc = gen_process(rng, cfg)
    n = proc.n
    S = partial_sum(proc, n)
    fn = u_norm(proc.success)
    reps = []
    for t in chernoff_grid(n, fn, 4):
        t = nudge_off_atoms(t, S)
        chain = chernoff_chain(proc, n, t)
        for (na, a), (nb, b) in zip(chain, chain[1:]):
            reps.append(BoundReport.leq(f"{na}<={nb}", a, b, cfg.tol, t=t))
        reps.append(BoundReport.eq("unit_form==final", chain[-2][1], chain[-1][1], 1e-12, t=t))
    return proc.descriptor(), reps


@prop(
    "tail_monotone",
    "the tail element is non-increasing in the level",
    "t1 < t2 => T P_{(S - t2 u)+} u <= T P_{(S - t1 u)+} u",
)
def tail_monotone(rng, cfg) -> Result:
    fam = gen_family(rng, cfg, "hoeffding")
    T = fam.T
    S = sum((X - T.apply(X) for X in fam.members[1:]), fam.members[0] - T.apply(fam.members[0]))
    hi = u_norm(S)
    ts = np.sort(rng.uniform(-hi - 0.5, hi + 0.5, size=6))
    tails = [tail_element(T, S, float(t)) for t in ts]
    return fam.descriptor(), [
        BoundReport.leq("tail_monotone", b, a, 1e-12, t1=float(t1), t2=float(t2))
        for (t1, a), (t2, b) in zip(zip(ts, tails), zip(ts[1:], tails[1:]))
    ]


@prop(
    "bennett",
    "Bennett inequality for independent summands dominated by the unit",
    "log T exp(tS) <= (e^t - t - 1) v;  T P_{(S - x u)+} u <= exp(-||v|| h(x / ||v||)), h(a) = (1+a)log(1+a) - a",
)
def bennett(rng, cfg) -> Result:
    fam = gen_family(rng, cfg, "bennett")
    T, fs = fam.T, list(fam.members)
    reps = []
    tail_rep = None
    for t in BENNETT_TS:
        mgf_rep, tail_rep = bennett_check(T, fs, t, 1.0, cfg.tol)
        reps.append(mgf_rep)
    if tail_rep is not None:
        vn = tail_rep.params["v_norm"]
        S = sum((f - T.apply(f) for f in fs[1:]), fs[0] - T.apply(fs[0]))
        for k in range(1, 9):
            x = nudge_off_atoms(3.0 * vn * k / 8, S)
            reps.append(bennett_check(T, fs, 1.0, x, cfg.tol)[1])
    return fam.descriptor(), reps


@prop(
    "hoeffding",
    "Hoeffding lemma and inequality for bounded independent summands",
    "log T exp(lam (X - TX)) <= lam^2 (b - a)^2 / 8 u;  "
    "T P_{(sum (X_i - T X_i) - t u)+} u <= exp(-2 t^2 / sum (b_i - a_i)^2) u",
)
def hoeffding(rng, cfg) -> Result:
    fam = gen_family(rng, cfg, "hoeffding")
    T, Xs, bounds = fam.T, list(fam.members), list(fam.bounds)
    reps = []
    certs = []
    for X, (a, b) in zip(Xs, bounds):
        cert = bounded_subgaussian(T, X, a, b, HOEFFDING_LAMBDAS, cfg.tol)
        certs.append(cert)
        reps.extend(cert.reports)
    S = sum((X - T.apply(X) for X in Xs[1:]), Xs[0] - T.apply(Xs[0]))
    half_range = sum(b - a for a, b in bounds) / 2
    for k in range(1, 9):
        t = nudge_off_atoms(half_range * k / 8, S)
        rb = hoeffding_bounded_check(T, Xs, bounds, t, cfg.tol)
        rs = hoeffding_sum_check(T, Xs, [c.parameter for c in certs], t, cfg.tol, lambda_grid=None)
        reps.append(rb)
        reps.append(rs)
        reps.append(BoundReport.eq("rhs_forms_identical", rb.rhs, rs.rhs, 0.0, t=t))
        literal = math.exp(-2 * t * t / sum((b - a) ** 2 for a, b in bounds))
        reps.append(BoundReport.rel("rhs_closed_form", rb.rhs, unit(T.space) * literal, 1e-15, t=t))
        reps.append(subgaussian_tail_check(certs[0], T, t, cfg.tol))
    return fam.descriptor(), reps
