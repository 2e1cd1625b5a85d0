"""Batch command-line front end: verify / run / attack / sweep.

Every experiment is fully determined by (command, params, seed); per-trial
generators are derived from the seed and trial index so results do not
depend on execution order. Exit codes: 0 all checks pass, 1 a check
failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import adversary as adv
from . import bpb, channels, protocol

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2

DEFAULT_TRIALS = 10_000


def derive_seed(seed: int, index: int) -> int:
    """Schedule-independent per-trial seed."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _secret_from_hex(text: str, l: int, flag: str) -> str:
    try:
        value = int(text, 16)
    except ValueError:
        raise SystemExit2(f"{flag} is not a hex string: {text!r}")
    if value >= 2 ** l:
        raise SystemExit2(f"{flag}={text} does not fit in {l} bits")
    return format(value, f"0{l}b")


class SystemExit2(Exception):
    """Configuration error; mapped to exit code 2."""


def _emit(text: str, output_path):
    if output_path:
        with open(output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    threshold = args.threshold
    rows, ok = [], True
    for ident in bpb.IdentityId:
        residual = bpb.verify_identity(ident)
        passed = residual < threshold
        ok &= passed
        rows.append([ident.value, f"{residual:.3e}", "pass" if passed else "fail"])
    mismatches = bpb.key_relation_table_mismatches()
    passed = not mismatches
    ok &= passed
    detail = "; ".join(f"printed={m['printed']} derived={m['derived']}"
                       for m in mismatches) or ""
    rows.append(["key_relation_table",
                 f"{len(mismatches)} mismatches{': ' + detail if detail else ''}",
                 "pass" if passed else "fail"])
    derivation = adv.derive_probe_constraints()
    merged_ok = derivation.merged.classes == (tuple(range(1, 17)),)
    ok &= merged_ok
    notes = "; ".join(
        f"{d['basis']} printed {d['printed']} -> derived {d['derived']}"
        for d in derivation.printed_discrepancies)
    rows.append(["probe_constraints",
                 f"merged classes={len(derivation.merged.classes)}"
                 + (f"; printed-condition misprints: {notes}" if notes else ""),
                 "pass" if merged_ok else "fail"])
    _emit(_csv(rows, ["check", "value", "status"]), args.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# --- run -------------------------------------------------------------------

P1_ATTACKS = {
    "fake-bell-product": lambda: adv.FakeBellProduct(),
    "fake-split-12-36-45": lambda: adv.FakeSplitForm(bpb.IdentityId.SPLIT_12_36_45),
    "fake-split-13-24-56": lambda: adv.FakeSplitForm(bpb.IdentityId.SPLIT_13_24_56),
    "fake-split-14-26-35": lambda: adv.FakeSplitForm(bpb.IdentityId.SPLIT_14_26_35),
    "fake-split-15-23-46": lambda: adv.FakeSplitForm(bpb.IdentityId.SPLIT_15_23_46),
    "fake-split-16-25-34": lambda: adv.FakeSplitForm(bpb.IdentityId.SPLIT_16_25_34),
}
OUTSIDE_ATTACKS = ("intercept-resend", "measure-resend")


def _session_setup(args):
    base = channels.parse_channel_spec(args.channel)
    p1_attack = None
    if args.adversary and args.adversary != "none":
        if args.adversary in OUTSIDE_ATTACKS:
            base = channels.tapped(adv.make_outside_adversary(args.adversary),
                                   inner=base)
        elif args.adversary in P1_ATTACKS:
            p1_attack = P1_ATTACKS[args.adversary]()
        else:
            raise SystemExit2(f"unknown adversary {args.adversary!r}")
    cfg = protocol.SessionConfig(
        l=args.l, delta=args.delta, d=args.d,
        err_threshold_decoy=args.threshold_decoy,
        err_threshold_sample=args.threshold_sample,
        seed=args.seed, channel_p2=base, channel_p3=base)
    return cfg, p1_attack


def cmd_run(args) -> int:
    for flag in ("l", "m1", "m2", "m3"):
        if getattr(args, flag) is None:
            raise SystemExit2(f"--{flag} is required (flag or config file)")
    cfg, p1_attack = _session_setup(args)
    m1 = _secret_from_hex(args.m1, args.l, "--m1")
    m2 = _secret_from_hex(args.m2, args.l, "--m2")
    m3 = _secret_from_hex(args.m3, args.l, "--m3")
    try:
        report = protocol.run_session(cfg, m1, m2, m3, p1_attack=p1_attack)
    except protocol.ConfigInvalid as exc:
        raise SystemExit2(str(exc))
    _emit(report.to_json() + "\n", args.output)
    transcript_path = args.transcript or (
        args.output + ".transcript.jsonl" if args.output else None)
    if transcript_path:
        protocol.write_transcript(report, transcript_path)
    return EXIT_OK


# --- attack ----------------------------------------------------------------

def cmd_attack(args) -> int:
    if args.mode == "constraints":
        derivation = adv.derive_probe_constraints()
        rows = []
        for name, classes in (("Z", derivation.z_classes),
                              ("X", derivation.x_classes),
                              ("merged", derivation.merged)):
            for group in classes.classes:
                rows.append([name, " ".join(map(str, group))])
        for d in derivation.printed_discrepancies:
            rows.append([f"misprint:{d['basis']}",
                         f"printed {d['printed']} -> derived {d['derived']}"])
        _emit(_csv(rows, ["partition", "classes"]), args.output)
        return EXIT_OK

    kind = args.kind
    rows = []
    for trial in range(args.trials):
        seed = derive_seed(args.seed, trial)
        cfg = protocol.SessionConfig(l=2, delta=args.delta, d=args.d, seed=seed,
                                     channel_p2=_attack_channel(kind),
                                     channel_p3=channels.ideal())
        p1_attack = P1_ATTACKS[kind]() if kind in P1_ATTACKS else None
        report = protocol.run_session(cfg, "00", "00", "00",
                                      p1_attack=p1_attack)
        detected = report.outcome.startswith("Aborted")
        step = {"AbortedDecoyCheck": "S2", "AbortedSampleCheck": "S3"}.get(
            report.outcome, "")
        err = max(report.stats["decoy_error_P2"], report.stats["decoy_error_P3"],
                  report.stats["sample_error"])
        rows.append([trial, int(detected), step, f"{err:.6f}"])
    _emit(_csv(rows, ["trial", "detected", "step_of_detection", "error_rate"]),
          args.output)
    return EXIT_OK


def _attack_channel(kind: str):
    if kind in OUTSIDE_ATTACKS:
        return channels.tapped(adv.make_outside_adversary(kind))
    return channels.ideal()


# --- sweep -----------------------------------------------------------------

def cmd_sweep(args) -> int:
    values = [float(v) for v in args.values.split(",")]
    rows = []
    for value in values:
        samples = []
        for trial in range(args.trials):
            seed = derive_seed(args.seed, int(value * 1_000_003) + trial)
            samples.append(_sweep_metric(args, value, seed))
        mean = float(np.mean(samples))
        stderr = float(np.std(samples, ddof=1) / math.sqrt(len(samples))) \
            if len(samples) > 1 else 0.0
        rows.append([args.var, _fmt_value(args.var, value),
                     f"{mean:.6f}", f"{stderr:.6f}", args.trials])
    _emit(_csv(rows, ["variable", "value", "mean", "stderr", "trials"]),
          args.output)
    return EXIT_OK


def _fmt_value(var, value):
    return str(int(value)) if var in ("d", "delta") else f"{value:g}"


def _sweep_metric(args, value, seed) -> float:
    kind = args.adversary
    if args.var == "d":
        cfg = protocol.SessionConfig(l=2, delta=0, d=int(value), seed=seed,
                                     channel_p2=_attack_channel(kind),
                                     channel_p3=channels.ideal())
        report = protocol.run_session(cfg, "00", "00", "00")
        return float(report.outcome.startswith("Aborted"))
    if args.var == "delta":
        p1_attack = P1_ATTACKS[kind]() if kind in P1_ATTACKS else None
        cfg = protocol.SessionConfig(l=2, delta=int(value), d=0, seed=seed)
        report = protocol.run_session(cfg, "00", "00", "00",
                                      p1_attack=p1_attack)
        return float(report.outcome.startswith("Aborted"))
    if args.var == "p_noise":
        cfg = protocol.SessionConfig(
            l=2, delta=0, d=args.d, seed=seed,
            err_threshold_decoy=1.0,
            channel_p2=channels.noisy(value), channel_p3=channels.noisy(value))
        report = protocol.run_session(cfg, "00", "00", "00")
        return (report.stats["decoy_error_P2"]
                + report.stats["decoy_error_P3"]) / 2.0
    if args.var == "p_loss":
        cfg = protocol.SessionConfig(
            l=2, delta=0, d=0, seed=seed,
            channel_p2=channels.lossy(value), channel_p3=channels.lossy(value))
        try:
            report = protocol.run_session(cfg, "00", "00", "00")
        except protocol.InsufficientStates:
            return 1.0
        return report.stats["lost_states"] / cfg.num_states
    raise SystemExit2(f"unknown sweep variable {args.var!r}")


# --- argument plumbing -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpcsim",
        description="Three-party quantum private comparison laboratory")
    parser.add_argument("--config", help="JSON file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="certify the algebraic identities")
    p.add_argument("--threshold", type=float, default=1e-10)
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run one protocol session")
    p.add_argument("--l", type=int)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m1", help="secret as hex")
    p.add_argument("--m2")
    p.add_argument("--m3")
    p.add_argument("--channel", default="ideal")
    p.add_argument("--adversary", default="none")
    p.add_argument("--threshold-decoy", type=float, default=0.0)
    p.add_argument("--threshold-sample", type=float, default=0.0)
    p.add_argument("--transcript")
    p.add_argument("--output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("attack", help="Monte Carlo attack trials")
    p.add_argument("mode", nargs="?", default="trials",
                   choices=["trials", "constraints"])
    p.add_argument("--kind", default="intercept-resend",
                   choices=sorted(list(P1_ATTACKS) + list(OUTSIDE_ATTACKS)))
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="metric versus a swept parameter")
    p.add_argument("--var", required=True,
                   choices=["d", "delta", "p_noise", "p_loss"])
    p.add_argument("--values", required=True, help="comma-separated points")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--adversary", default="intercept-resend")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sweep)
    parser.subcommands = {name: sp for name, sp in sub.choices.items()}
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, _ = parser.parse_known_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
        defaults = {k.replace("-", "_"): v for k, v in overrides.items()}
        # Defaults must land on the subparser: its own defaults would
        # otherwise overwrite parser-level ones during the final parse.
        parser.subcommands[args.command].set_defaults(**defaults)
    args = parser.parse_args(argv)
    if "QPC_SEED" in os.environ and hasattr(args, "seed"):
        args.seed = int(os.environ["QPC_SEED"])
    try:
        return args.func(args)
    except (SystemExit2, protocol.ConfigInvalid, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
