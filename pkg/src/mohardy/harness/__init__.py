"""Experiment harness: random inputs, hypothesis checks, campaigns and reports."""

from .campaigns import ExperimentConfig, VerificationReport, verify, write_report
from .experiments import (AtomCampaignConfig, atom_campaign, fejer_convergence, five_space_campaign,
                          five_space_report)
from .generators import generate_martingale

__all__ = ["ExperimentConfig", "VerificationReport", "verify", "write_report", "AtomCampaignConfig",
           "atom_campaign", "fejer_convergence", "five_space_campaign", "five_space_report",
           "generate_martingale"]
