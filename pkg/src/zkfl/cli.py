"""Command-line entry point.

Exit codes: 0 success, 2 usage or configuration error, 3 verification halt
or audit failure. Set ZKFL_LOG=DEBUG|INFO|WARNING for log output on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from zkfl import aggproof
from zkfl.chain import audit_run_dir
from zkfl.crypto.groups import get_group
from zkfl.crypto.schnorr import keygen
from zkfl.errors import ConfigError, ZkflError
from zkfl.fl.adversary import ATTACK_KINDS, AttackScript
from zkfl.fl.sim import MODES, ExperimentConfig, run_experiment
from zkfl.metrics import summarize, write_reports, write_summary

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_HALT = 3

log = logging.getLogger("zkfl")

SIZE_COLUMNS = ("d", "n", "group", "bytes_plain_update", "bytes_enc_update", "bytes_proof", "bytes_statement")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError("dimensions must be positive integers")
    return dims


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zkfl", description="Verifiable aggregation for federated learning.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mode=True):
        sp.add_argument("--config", type=Path, help="experiment config (JSON)")
        if mode:
            sp.add_argument("--mode", choices=MODES)
        sp.add_argument("--seed", type=_u64)
        sp.add_argument("--group", choices=("test", "prod"))
        sp.add_argument("--frac-bits", type=int, dest="frac_bits")
        sp.add_argument("--out", type=Path, default=Path("zkfl-out"), help="output directory")
        sp.add_argument("--no-figures", action="store_true", help="skip matplotlib output")

    sp = sub.add_parser("simulate", help="run a federated training experiment")
    common(sp)
    sp.add_argument("--rounds", type=int)

    sp = sub.add_parser("attack-demo", help="run one round with a malicious aggregator")
    common(sp)
    sp.add_argument("--kind", choices=ATTACK_KINDS, required=True)
    sp.add_argument("--naive", action="store_true", help="tamper without rebuilding Enc(w) and the proof")

    sp = sub.add_parser("bench-sizes", help="message sizes across model dimensions")
    common(sp, mode=False)
    sp.add_argument("--dims", type=_dims, default=[64, 128, 256, 512, 1024])
    sp.add_argument("--clients", type=int, default=2)

    sp = sub.add_parser("audit-chain", help="re-verify a persisted chain")
    sp.add_argument("run_dir", type=Path, nargs="?", help="directory holding chain.log")
    sp.add_argument("--out", type=Path, help="same as run_dir")
    sp.add_argument("--structure-only", action="store_true", help="skip proof replay")

    sp = sub.add_parser("selftest", help="quick end-to-end sanity checks")
    sp.add_argument("--group", choices=("test", "prod"), default="prod")
    return p


def _load_config(args, **overrides) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    for key in ("mode", "seed", "group", "frac_bits", "rounds"):
        v = getattr(args, key, None)
        if v is not None:
            data[key] = v
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


def _write_run(result, out: Path, figures: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(result.config.to_dict(), indent=2))
    write_reports(result.reports, out)
    write_summary(summarize(result.reports), out)
    if result.chain is not None:
        result.chain.save(out)
    if figures:
        from zkfl import plotting

        plotting.plot_timings(result.reports, out / "figures" / "timings.png")
        plotting.plot_accuracy(result.reports, out / "figures" / "accuracy.png")


def _print_run(result) -> None:
    for r in result.reports:
        line = f"round {r.round:3d}  {r.outcome:8s}  acc={r.accuracy:.4f}  loss={r.loss:.4f}"
        if r.diagnostics:
            line += f"  failed: {r.diagnostics}"
        print(line)
    for row in summarize(result.reports):
        print(f"{row['term']:16s} mean={1e3 * row['mean']:9.3f} ms  std={1e3 * row['std']:8.3f} ms  n={row['count']}")


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    result = run_experiment(cfg)
    _write_run(result, args.out, not args.no_figures)
    _print_run(result)
    if result.halted:
        print(f"halted at round {result.reports[-1].round}: {result.reports[-1].diagnostics}", file=sys.stderr)
        return EXIT_HALT
    return EXIT_OK


def cmd_attack_demo(args) -> int:
    base = {"N": 4, "n": 4, "rounds": 2}
    if args.config:
        base = {}
    cfg = _load_config(args, **base)
    attack = AttackScript(kind=args.kind, round=cfg.rounds, adaptive=not args.naive)
    cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "attacks": [attack.to_dict()]})
    result = run_experiment(cfg)
    _write_run(result, args.out, not args.no_figures)
    _print_run(result)
    if result.halted:
        last = result.reports[-1]
        print(f"{args.kind} attack detected at round {last.round}; failed checks: {last.diagnostics}")
        return EXIT_HALT
    print(f"{args.kind} attack was NOT detected", file=sys.stderr)
    return EXIT_OK


def bench_sizes(dims: Sequence[int], group: str = "prod", clients: int = 2, seed: int = 0) -> list[dict]:
    """Sizes of the transmitted encodings for one honest round per dimension."""
    params = get_group(group)
    rng = random.Random(seed)
    keys = [keygen(params, f"bench:{seed}:{i}".encode()) for i in range(clients)]
    rows = []
    for d in dims:
        bundles = [
            aggproof.make_bundle(k, f"client-{i}", 1, [rng.randrange(params.order) for _ in range(d)], rng)
            for i, k in enumerate(keys)
        ]
        st, wit = aggproof.aggregate(bundles)
        proof = aggproof.prove(st, wit, rng)
        if not aggproof.verify_miner(st, proof):
            raise ZkflError(f"benchmark proof for d={d} did not verify")
        rows.append({
            "d": d,
            "n": clients,
            "group": group,
            "bytes_plain_update": 4 + 8 * d,
            "bytes_enc_update": len(b"".join(e.to_bytes() for e in bundles[0].enc_w)),
            "bytes_proof": len(proof.to_bytes()),
            "bytes_statement": len(st.to_bytes()),
        })
    return rows


def cmd_bench_sizes(args) -> int:
    if args.clients < 1:
        raise ConfigError("--clients must be >= 1")
    rows = bench_sizes(args.dims, args.group or "prod", args.clients, args.seed or 0)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sizes.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SIZE_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    (out / "sizes.json").write_text(json.dumps(rows, indent=2))
    if not args.no_figures:
        from zkfl import plotting

        plotting.plot_sizes(rows, out / "figures" / "sizes.png")
    for r in rows:
        print(f"d={r['d']:6d}  enc_update={r['bytes_enc_update']:8d} B  proof={r['bytes_proof']:4d} B  "
              f"statement={r['bytes_statement']:9d} B")
    return EXIT_OK


def cmd_audit_chain(args) -> int:
    run_dir = args.run_dir or args.out
    if run_dir is None:
        print("audit-chain: a run directory is required", file=sys.stderr)
        return EXIT_USAGE
    failures, nblocks = audit_run_dir(run_dir, verify_proofs=not args.structure_only)
    if failures:
        for f in failures:
            print(f"FAIL {f}")
        return EXIT_HALT
    print(f"chain OK: {nblocks} blocks, {max(nblocks - 1, 0)} proofs verified")
    return EXIT_OK


def cmd_selftest(args) -> int:
    params = get_group(args.group)
    rng = random.Random(1)
    checks = []
    keys = [keygen(params, f"selftest:{i}".encode()) for i in range(3)]
    bundles = [aggproof.make_bundle(k, f"c{i}", 1, [rng.randrange(params.order) for _ in range(8)], rng)
               for i, k in enumerate(keys)]
    st, wit = aggproof.aggregate(bundles)
    proof = aggproof.prove(st, wit, rng)
    opening = aggproof.ClientOpening(wit.agg, wit.agg_blind)
    roster = {b.client_id: b.pk for b in bundles}
    checks.append(("miner accepts honest proof", aggproof.verify_miner(st, proof, roster)))
    checks.append(("clients accept honest proof",
                   all(aggproof.verify_client(st, proof, opening, b, roster) for b in bundles)))
    short = {c: pk for c, pk in list(roster.items())[:2]}
    checks.append(("miner rejects unknown client", not aggproof.verify_miner(st, proof, short)))
    bad = aggproof.AggregationProof(proof.A, proof.z_m, (proof.z_r + 1) % params.order, proof.rho, proof.c)
    checks.append(("miner rejects tampered proof", not aggproof.verify_miner(st, bad, roster)))
    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok &= passed
    return EXIT_OK if ok else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "attack-demo": cmd_attack_demo,
    "bench-sizes": cmd_bench_sizes,
    "audit-chain": cmd_audit_chain,
    "selftest": cmd_selftest,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    level = getattr(logging, os.environ.get("ZKFL_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"zkfl: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
