"""Seeded verification harness: instance generation, property suite, curves and CLI."""

from .config import SuiteConfig
from .curves import curve_rows, emit_curves, process_from_spec
from .instances import Family, gen_family, gen_instance, gen_process, trial_rng
from .properties import PROPERTIES
from .suite import SuiteReport, replay, run_suite, run_trial
