"""Federated averaging rounds with verifiable aggregation.

Per round, the cohort trains locally, quantizes and commits to its updates,
the aggregator sums them and proves the sum, and then either every cohort
client verifies the proof (``direct`` mode) or a miner quorum verifies it and
appends Enc(w) to the chain, after which clients only read the chain
(``blockchain`` mode). Clients apply the mean update w/n only after a round
verifies; the first failed round halts the run.

With ``zkfl`` disabled the same quantized sums are exchanged without any
commitments, so both settings produce the same model trajectory.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from zkfl import aggproof
from zkfl.aggproof import UpdateCommitmentBundle, make_bundle
from zkfl.chain import Chain, Miner, statement_hash
from zkfl.crypto.codec import FixedPointCodec
from zkfl.crypto.groups import get_group
from zkfl.crypto.schnorr import keygen
from zkfl.errors import ConfigError, Rejection
from zkfl.fl.adversary import AggregatorOutput, AttackScript, malicious_aggregation
from zkfl.fl.data import make_dataset
from zkfl.fl.model import ToyModel, local_train
from zkfl.metrics import RoundReport, Stopwatch
from zkfl.selection import RegistryEntry, round_seed, select_clients, vrf_eval

log = logging.getLogger(__name__)

MODES = ("direct", "blockchain")


@dataclass
class ExperimentConfig:
    seed: int = 0
    N: int = 4
    n: int = 4
    rounds: int = 5
    epochs: int = 1
    lr: float = 0.1
    mode: str = "direct"
    frac_bits: int = 16
    group: str = "prod"
    attacks: list[AttackScript] = field(default_factory=list)
    zkfl: bool = True
    miners: int = 3
    samples: int = 2048
    batch_size: int = 32

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 1 <= self.n <= self.N:
            raise ConfigError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if self.rounds < 1 or self.epochs < 0 or self.lr <= 0 or self.batch_size < 1:
            raise ConfigError("rounds >= 1, epochs >= 0, lr > 0 and batch_size >= 1 required")
        if self.samples < self.N:
            raise ConfigError("need at least one sample per client")
        if self.mode == "blockchain" and (not self.zkfl or self.miners < 1):
            raise ConfigError("blockchain mode needs zkfl enabled and at least one miner")
        try:
            params = get_group(self.group)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        # raises ConfigError when sums of N updates could wrap mod q
        FixedPointCodec(params.order, self.frac_bits, 32, n_max=max(self.N, 1) + 1)
        rounds = [a.round for a in self.attacks]
        if len(rounds) != len(set(rounds)):
            raise ConfigError("at most one attack per round")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        d = dict(d)
        d["attacks"] = [a if isinstance(a, AttackScript) else AttackScript.from_dict(a) for a in d.get("attacks", [])]
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["attacks"] = [a.to_dict() for a in self.attacks]
        return out


@dataclass
class RoundOutcome:
    round: int
    verified: bool
    global_update: Optional[np.ndarray]
    halted: bool
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    outcomes: list[RoundOutcome]
    reports: list[RoundReport]
    trajectory: list[np.ndarray]
    chain: Optional[Chain]

    @property
    def halted(self) -> bool:
        return any(o.halted for o in self.outcomes)


class Federation:
    """All parties of one experiment, simulated in a single process."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.params = get_group(config.group)
        self.codec = FixedPointCodec(self.params.order, config.frac_bits, 32, n_max=config.N + 1)
        self.model = ToyModel()
        self.data = make_dataset(config.N, config.seed, samples=config.samples)
        self.client_ids = [f"client-{k}" for k in range(config.N)]
        self.keys = [keygen(self.params, f"{config.seed}:{cid}".encode()) for cid in self.client_ids]
        theta0 = self.model.init(config.seed)
        self.thetas = [theta0.copy() for _ in self.client_ids]
        self.rng = random.Random(config.seed)
        self.attacks = {a.round: a for a in config.attacks}
        self.chain = Chain(self.params) if config.mode == "blockchain" else None
        self.miners = [Miner(f"miner-{i}") for i in range(config.miners)]
        self.trajectory: list[np.ndarray] = []
        self.halted = False

    # cohort selection
    def cohort(self, round: int) -> list[int]:
        if self.config.mode == "direct":
            return list(range(self.config.n))
        seed = round_seed(self.chain.tip.block_hash, round)
        registry = [
            RegistryEntry(cid, key.pk, vrf_eval(key, seed)) for cid, key in zip(self.client_ids, self.keys)
        ]
        result = select_clients(seed, registry, self.config.n, round)
        return sorted(self.client_ids.index(cid) for cid in result.chosen)

    def _train_seed(self, round: int, k: int) -> np.random.SeedSequence:
        return np.random.SeedSequence([self.config.seed, round, k])

    def run_round(self, round: int, attack: Optional[AttackScript] = None) -> tuple[RoundOutcome, RoundReport]:
        cfg = self.config
        sw = Stopwatch()
        params, codec = self.params, self.codec
        with sw.time("select"):
            cohort = self.cohort(round)
        n, d = len(cohort), self.model.dim
        report = RoundReport(round=round, mode=cfg.mode, n=n, d=d)
        if cfg.mode == "blockchain":
            report.t_select = sw.totals["select"]

        deltas = []
        with sw.time("train"):
            for k in cohort:
                deltas.append(local_train(self.model, self.thetas[k], self.data.shard(k), cfg.epochs, cfg.lr,
                                          self._train_seed(round, k), cfg.batch_size))
        report.t_train = sw.totals["train"] / n

        quantized = [codec.quantize_vector(delta) for delta in deltas]
        report.n_clamped = int(sum(qv.clamped.sum() for qv in quantized))
        report.bytes_plain_update = 4 + 8 * d

        if not cfg.zkfl:
            agg = [sum(col) % params.order for col in zip(*(qv.values for qv in quantized))]
            outcome = self._apply(round, agg, n, [])
            self._evaluate(report)
            return outcome, report

        bundles: list[UpdateCommitmentBundle] = []
        with sw.time("enc"):
            for k, qv in zip(cohort, quantized):
                bundles.append(make_bundle(self.keys[k], self.client_ids[k], round, qv.values, self.rng))
        report.t_enc = sw.totals["enc"] / n
        report.bytes_enc_update = len(b"".join(e.to_bytes() for e in bundles[0].enc_w))

        with sw.time("aggr"):
            if attack is None:
                statement, witness = aggproof.aggregate(bundles)
        if attack is None:
            with sw.time("prove"):
                proof = aggproof.prove(statement, witness, self.rng)
            out = AggregatorOutput(statement, proof, aggproof.ClientOpening(witness.agg, witness.agg_blind))
        else:
            log.info("round %d: aggregator runs %s attack", round, attack.kind)
            with sw.time("prove"):
                out = malicious_aggregation(bundles, attack, self.rng, codec)
        report.t_aggr = sw.totals.get("aggr", 0.0)
        report.t_prove = sw.totals["prove"]
        report.bytes_proof = len(out.proof.to_bytes())
        report.bytes_statement = len(out.statement.to_bytes())

        roster = {self.client_ids[k]: self.keys[k].pk for k in cohort}
        failed: list[str] = []
        if cfg.mode == "direct":
            with sw.time("verify_client"):
                for b in bundles:
                    failed += aggproof.verify_client_diagnostics(out.statement, out.proof, out.opening, b, roster)
            report.t_verify_client = sw.totals["verify_client"] / n
        else:
            with sw.time("verify_miner"):
                try:
                    self.chain.submit(out.statement, out.proof, self.miners, roster)
                except Rejection as rej:
                    failed += [r for rs in rej.reasons.values() for r in rs]
            report.t_verify_miner = sw.totals["verify_miner"] / len(self.miners)
            with sw.time("chain_read"):
                block = self.chain.read_round(round)
                if not failed and (block is None or block.statement_hash != statement_hash(out.statement)):
                    failed.append("not-on-chain")
            report.t_chain_read = sw.totals["chain_read"]

        failed = sorted(set(failed))
        if failed:
            report.outcome = "halted"
            report.diagnostics = ";".join(failed)
            self.halted = True
            log.warning("round %d halted: %s", round, report.diagnostics)
            self._evaluate(report)
            return RoundOutcome(round, False, None, True, failed), report
        outcome = self._apply(round, out.opening.agg, n, [])
        self._evaluate(report)
        return outcome, report

    def _apply(self, round: int, agg: list[int], n: int, diagnostics: list[str]) -> RoundOutcome:
        mean = self.codec.dequantize_vector(agg, n_summed=n) / n
        for theta in self.thetas:
            theta += mean
        self.trajectory.append(self.thetas[0].copy())
        return RoundOutcome(round, True, mean, False, diagnostics)

    def _evaluate(self, report: RoundReport) -> None:
        theta = self.thetas[0]
        report.accuracy = self.model.accuracy(theta, self.data.x_test, self.data.y_test)
        report.loss = self.model.loss(theta, self.data.x_test, self.data.y_test)

    def run(self) -> ExperimentResult:
        outcomes, reports = [], []
        for round in range(1, self.config.rounds + 1):
            outcome, report = self.run_round(round, self.attacks.get(round))
            outcomes.append(outcome)
            reports.append(report)
            if outcome.halted:
                break
        return ExperimentResult(self.config, outcomes, reports, self.trajectory, self.chain)


def run_round(federation: Federation, round: int, attack: Optional[AttackScript] = None) -> RoundOutcome:
    return federation.run_round(round, attack)[0]


def run_experiment(config: ExperimentConfig | dict) -> ExperimentResult:
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    return Federation(config).run()
