"""Probability in finite Riesz spaces.

Exponential calculus, conditional expectations, conditional independence,
moment generating functions and the Chernoff, Bennett and Hoeffding bounds on
a computable finite carrier, together with classical oracles and a seeded
verification harness.
"""

from .calculus import (
    SeriesConfig,
    exp_pointwise,
    exp_series,
    log_element,
    mgf,
    phi_map,
    phi_scalar,
    psi,
    secant_z,
)
from .errors import *  # noqa: F401,F403
from .expectation import (
    BernoulliProcess,
    CondExpectation,
    apply_T,
    check_T_independent_elements,
    check_T_independent_projections,
    lemma_indep_product,
    lift_base,
    lift_coin_function,
    make_bernoulli_process,
    make_cond_expectation,
    partial_sum,
    range_contains,
)
from .inequalities import (
    SubGaussianCert,
    bennett_check,
    bennett_h,
    bounded_subgaussian,
    chernoff_chain,
    chernoff_check,
    chernoff_rhs,
    hoeffding_bounded_check,
    hoeffding_sum_check,
    subgaussian_check,
    subgaussian_tail_check,
    tail_element,
)
from .lattice import (
    BandProjection,
    Element,
    Space,
    absolute,
    add,
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
    subtract,
    sup,
    u_norm,
    unit,
    zero,
)
from .report import BoundReport

__version__ = "0.1.0"
