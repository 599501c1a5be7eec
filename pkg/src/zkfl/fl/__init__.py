"""Federated learning simulation: toy model, synthetic data, adversaries and rounds."""

from zkfl.fl.adversary import ATTACK_KINDS, AttackScript, malicious_aggregation
from zkfl.fl.sim import ExperimentConfig, Federation, RoundOutcome, run_experiment, run_round

__all__ = [
    "ATTACK_KINDS",
    "AttackScript",
    "ExperimentConfig",
    "Federation",
    "RoundOutcome",
    "malicious_aggregation",
    "run_experiment",
    "run_round",
]
