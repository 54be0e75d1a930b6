"""Seeded verification harness."""

from .baselines import load_baselines, save_baselines
from .checks import (check_interp_error, check_lemma3, check_lemma4, check_lemma_k1,
                     check_main_theorem, check_section4_chain, interp_sides, run_config,
                     run_interp, run_lemma3, run_lemma4, run_section4, run_suite,
                     theorem_sides)
from .config import TrialConfig, config_from_dict, load_configs
from .report import Row, VerificationReport

__all__ = [
    "TrialConfig", "VerificationReport", "Row", "config_from_dict", "load_configs",
    "load_baselines", "save_baselines", "check_main_theorem", "check_lemma_k1",
    "check_lemma3", "check_lemma4", "check_section4_chain", "check_interp_error",
    "interp_sides", "theorem_sides", "run_config", "run_suite", "run_interp",
    "run_lemma3", "run_lemma4", "run_section4",
]
