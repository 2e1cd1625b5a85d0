"""The three-party private-comparison protocol over simulated channels.

One Session object runs the five steps: resource distribution with decoys
(S1), decoy eavesdropping check (S2), collaborative sample-state check of
the distributor's honesty (S3), Bell-basis key extraction (S4), and the
ciphertext-exchange comparison (S5). Sessions are single shot: a failed
check yields an Aborted report, never a retry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import channels as chan
from .bpb import encode, gamma_basis, make_psi6qb
from .payload import DecoyRecord, PayloadSlot, QuantumPayload, QubitSystem
from .statevec import BellOutcome, bell_basis, single_qubit_state, x_basis, z_basis


class ConfigInvalid(ValueError):
    pass


class InsufficientSamples(RuntimeError):
    pass


class InsufficientStates(RuntimeError):
    """Channel loss left fewer usable states than the secrets require."""


P1, P2, P3 = "P1", "P2", "P3"

DECOY_STATES = ("0", "1", "+", "-")
_DECOY_BASIS = {"0": ("Z", 0), "1": ("Z", 1), "+": ("X", 0), "-": ("X", 1)}


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError("bit strings differ in length")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def pad_secret(m: str) -> str:
    """Pad to an even length with one trailing 0 bit; equal across parties."""
    return m + "0" * (len(m) % 2)


@dataclass(frozen=True)
class SessionConfig:
    l: int
    delta: int = 0
    d: int = 0
    err_threshold_decoy: float = 0.0
    err_threshold_sample: float = 0.0
    seed: int = 0
    channel_p2: chan.ChannelModel = None
    channel_p3: chan.ChannelModel = None

    def __post_init__(self):
        if self.l < 1:
            raise ConfigInvalid("l must be >= 1")
        if self.delta < 0 or self.d < 0:
            raise ConfigInvalid("delta and d must be >= 0")
        for t in (self.err_threshold_decoy, self.err_threshold_sample):
            if not 0.0 <= t <= 1.0:
                raise ConfigInvalid("thresholds must be in [0, 1]")
        if self.channel_p2 is None:
            object.__setattr__(self, "channel_p2", chan.ideal())
        if self.channel_p3 is None:
            object.__setattr__(self, "channel_p3", chan.ideal())

    @property
    def num_states(self) -> int:
        return math.ceil(self.l / 2) + self.delta

    @property
    def num_key_states(self) -> int:
        return math.ceil(self.l / 2)


def _check_secret(m: str, l: int, who: str) -> str:
    if len(m) != l or set(m) - {"0", "1"}:
        raise ConfigInvalid(f"{who} must be a bit string of length {l}")
    return m


@dataclass
class Message:
    step: str
    sender: str
    receiver: str
    kind: str
    payload: dict
    channel: str = "classical"

    def to_json(self) -> str:
        return json.dumps(
            {"step": self.step, "from": self.sender, "to": self.receiver,
             "kind": self.kind, "payload": self.payload,
             "channel": self.channel},
            sort_keys=True)


@dataclass
class PartyState:
    name: str
    secret: str
    pairs: dict = field(default_factory=dict)  # state_index -> (system, labels)
    key: str = ""
    ciphertext: str = ""


@dataclass
class SessionReport:
    outcome: str  # AllEqual | NotAllEqual | AbortedDecoyCheck | AbortedSampleCheck
    pairwise: dict
    transcript: list
    stats: dict

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "pairwise": self.pairwise,
            "stats": self.stats,
            "transcript": [json.loads(m.to_json()) for m in self.transcript],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class Session:
    """Single-threaded event loop over the three party state machines."""

    def __init__(self, cfg: SessionConfig, m1: str, m2: str, m3: str,
                 p1_attack=None):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.p1 = PartyState(P1, _check_secret(m1, cfg.l, "m1"))
        self.p2 = PartyState(P2, _check_secret(m2, cfg.l, "m2"))
        self.p3 = PartyState(P3, _check_secret(m3, cfg.l, "m3"))
        self.p1_attack = p1_attack
        self.transcript: list = []
        self.stats = {"decoy_error_P2": 0.0, "decoy_error_P3": 0.0,
                      "sample_error": 0.0, "lost_states": 0}
        self._manifests = {}   # receiver -> {position: DecoyRecord}
        self._survivors = []   # state indices delivered on both channels
        self._samples = []

    def log(self, step, sender, receiver, kind, payload, channel="classical"):
        self.transcript.append(Message(step, sender, receiver, kind,
                                       dict(payload), channel))

    # -- S1 ------------------------------------------------------------

    def s1_prepare(self):
        """Create the resource states and the two decoy-laden payloads."""
        n = self.cfg.num_states
        if self.p1_attack is not None:
            groups = self.p1_attack.prepare_states(n)
        else:
            groups = []
            for _ in range(n):
                sys = QubitSystem(make_psi6qb())
                groups.append(((sys, (1, 2)), (sys, (3, 4)), (sys, (6, 5))))
        payloads = {}
        for i, (hold1, hold2, hold3) in enumerate(groups):
            self.p1.pairs[i] = hold1
            self.p2.pairs[i] = hold2
            self.p3.pairs[i] = hold3
        for receiver, party in ((P2, self.p2), (P3, self.p3)):
            pair_slots = [PayloadSlot("pair", sys, labels, state_index=i)
                          for i, (sys, labels) in sorted(party.pairs.items())]
            slots, manifest = self._insert_decoys(pair_slots)
            self._manifests[receiver] = manifest
            payloads[receiver] = QuantumPayload(slots)
            self.log("S1", P1, receiver, "quantum_payload",
                     {"num_slots": len(slots)}, channel="quantum")
        return payloads[P2], payloads[P3]

    def _insert_decoys(self, pair_slots):
        d = self.cfg.d
        total = len(pair_slots) + d
        positions = sorted(self.rng.choice(total, size=d, replace=False).tolist()) \
            if d else []
        manifest = {}
        slots, it = [], iter(pair_slots)
        for pos in range(total):
            if pos in positions:
                name = DECOY_STATES[int(self.rng.integers(4))]
                basis, bit = _DECOY_BASIS[name]
                sys = QubitSystem(single_qubit_state(name, label="d"))
                slots.append(PayloadSlot("decoy", sys, ("d",)))
                manifest[pos] = DecoyRecord(pos, basis, bit, name)
            else:
                slots.append(next(it))
        return slots, manifest

    # -- S2 ------------------------------------------------------------

    def s2_decoy_check(self, receiver: str, payload: QuantumPayload,
                       delivery: chan.DeliveryReport):
        """Decoy eavesdropping check on one link; returns (passed, error_rate)."""
        manifest = self._manifests[receiver]
        self.log("S2", receiver, P1, "receipt_ack",
                 {"received_positions": delivery.delivered_positions})
        positions = sorted(manifest)
        self.log("S2", P1, receiver, "decoy_positions", {"positions": positions})
        self.log("S2", P1, receiver, "decoy_bases",
                 {"bases": {str(p): manifest[p].basis for p in positions}})
        outcomes = {}
        for pos in positions:
            slot = payload.slots[pos]
            if slot is None:
                continue  # lost decoys cannot be checked
            basis = z_basis(1) if manifest[pos].basis == "Z" else x_basis(1)
            rec = slot.system.measure(slot.labels, basis, self.rng)
            outcomes[pos] = rec.outcome_index
        self.log("S2", receiver, P1, "decoy_outcomes",
                 {"outcomes": {str(p): b for p, b in outcomes.items()}})
        if outcomes:
            errors = sum(1 for p, b in outcomes.items() if b != manifest[p].bit)
            rate = errors / len(outcomes)
        else:
            rate = 0.0
        self.stats[f"decoy_error_{receiver}"] = rate
        return rate <= self.cfg.err_threshold_decoy, rate

    # -- S3 ------------------------------------------------------------

    def _believed_targets(self, index):
        """Map believed qubit positions to the held (system, label) qubits."""
        sys1, labs1 = self.p1.pairs[index]
        sys2, labs2 = self.p2.pairs[index]
        sys3, labs3 = self.p3.pairs[index]
        return {
            1: (sys1, labs1[0]), 2: (sys1, labs1[1]),
            3: (sys2, labs2[0]), 4: (sys2, labs2[1]),
            6: (sys3, labs3[0]), 5: (sys3, labs3[1]),
        }

    def s3_sample_check(self, num_samples: int = None):
        """Collaborative check that P1 distributed genuine resource states."""
        if num_samples is None:
            # Loss can eat into the sample budget; never sacrifice states the
            # keys will need.
            num_samples = min(self.cfg.delta,
                              max(len(self._survivors) - self.cfg.num_key_states, 0))
        elif num_samples > 0 and (self.cfg.delta == 0
                                  or num_samples > len(self._survivors)):
            raise InsufficientSamples(
                f"{num_samples} samples demanded, "
                f"delta={self.cfg.delta}, {len(self._survivors)} states held")
        if num_samples == 0:
            self.stats["sample_error"] = 0.0
            return True, 0.0
        chosen = sorted(
            self.rng.choice(len(self._survivors), size=num_samples,
                            replace=False).tolist()) if num_samples else []
        samples = [self._survivors[i] for i in chosen]
        self._samples = samples
        self.log("S3", P2, P1, "sample_positions", {"positions": samples})
        mismatches = 0
        for index in samples:
            basis_name = "Z" if self.rng.random() < 0.5 else "X"
            self.log("S3", P2, P1, "basis_instruction",
                     {"state": index, "basis": basis_name})
            single = z_basis(1) if basis_name == "Z" else x_basis(1)
            gamma = gamma_basis(1 if basis_name == "Z" else 2)
            targets = self._believed_targets(index)

            if self.p1_attack is not None and \
                    hasattr(self.p1_attack, "announce_sample_bits"):
                z1, z2 = self.p1_attack.announce_sample_bits(basis_name, self.rng)
            else:
                z1 = self._measure_single(targets[1], single)
                z2 = self._measure_single(targets[2], single)
            z3 = self._measure_single(targets[3], single)
            g = self._measure_gamma(targets, gamma)
            self.log("S3", P1, P2, "sample_outcomes",
                     {"state": index, "p1_bits": [z1, z2]})
            self.log("S3", P2, P3, "sample_outcomes",
                     {"state": index, "bit3": z3, "gamma_index": g})
            if g != (z1 << 2) | (z2 << 1) | z3:
                mismatches += 1
        rate = mismatches / num_samples if num_samples else 0.0
        self.stats["sample_error"] = rate
        self._survivors = [i for i in self._survivors if i not in set(samples)]
        return rate <= self.cfg.err_threshold_sample, rate

    def _measure_single(self, target, basis) -> int:
        sys, lab = target
        return sys.measure((lab,), basis, self.rng).outcome_index

    def _measure_gamma(self, targets, gamma) -> int:
        """Joint measurement of believed qubits (4, 5, 6) in a gamma family.

        Qubit 4 sits at P2 while 5 and 6 sit at P3; the joint projection is
        executed through the classical transcript as one logged operation.
        """
        sys4, lab4 = targets[4]
        sys5, lab5 = targets[5]
        sys6, lab6 = targets[6]
        if sys4 is sys5 is sys6:
            rec = sys4.measure((lab4, lab5, lab6), gamma, self.rng)
            return rec.outcome_index
        # Qubits live in separate registers (fake product states): merge the
        # registers into one system so the entangled projection is exact.
        merged = self._merge_systems(targets)
        rec = merged.measure(("m4", "m5", "m6"), gamma, self.rng)
        return rec.outcome_index

    def _merge_systems(self, targets):
        import functools

        from .statevec import tensor, StateVector

        systems = []
        for believed, (sys, lab) in sorted(targets.items()):
            if sys not in systems:
                systems.append(sys)
        relabeled = []
        label_map = {}
        for si, sys in enumerate(systems):
            new_labels = tuple(f"s{si}.{lab}" for lab in sys.labels)
            for old, new in zip(sys.labels, new_labels):
                label_map[(id(sys), old)] = new
            relabeled.append(StateVector(new_labels, sys.state.amps))
        joint = functools.reduce(tensor, relabeled)
        rename = {}
        for believed in (4, 5, 6):
            sys, lab = targets[believed]
            rename[label_map[(id(sys), lab)]] = f"m{believed}"
        joint = StateVector(tuple(rename.get(l, l) for l in joint.labels),
                            joint.amps)
        merged = QubitSystem(joint)
        # The merged register replaces the originals for every holder.
        for party in (self.p1, self.p2, self.p3):
            for index, (sys, labs) in list(party.pairs.items()):
                if sys in systems:
                    new_labs = tuple(
                        rename.get(label_map[(id(sys), lab)],
                                   label_map[(id(sys), lab)])
                        for lab in labs)
                    party.pairs[index] = (merged, new_labs)
        return merged

    # -- S4 ------------------------------------------------------------

    def s4_extract_keys(self):
        """Bell-measure the remaining states and form keys and ciphertexts."""
        need = self.cfg.num_key_states
        if len(self._survivors) < need:
            raise InsufficientStates(
                f"{len(self._survivors)} states left, {need} required")
        key_states = self._survivors[:need]
        basis = bell_basis()
        for party in (self.p1, self.p2, self.p3):
            blocks = []
            for index in key_states:
                sys, labs = party.pairs[index]
                rec = sys.measure(labs, basis, self.rng)
                blocks.append(str(encode(BellOutcome(rec.outcome_name))))
            party.key = "".join(blocks)
            party.ciphertext = xor_bits(pad_secret(party.secret), party.key)

    # -- S5 ------------------------------------------------------------

    def s5_compare(self) -> SessionReport:
        self.log("S5", P2, P1, "ciphertext", {"c": self.p2.ciphertext})
        self.log("S5", P3, P1, "ciphertext", {"c": self.p3.ciphertext})
        m2_xor_m3 = xor_bits(xor_bits(self.p1.key, self.p2.ciphertext),
                             self.p3.ciphertext)
        pairwise = {"M2vsM3": "unknown", "M1vsM3": "unknown",
                    "M1vsM2": "unknown"}
        if "1" in m2_xor_m3:
            pairwise["M2vsM3"] = "unequal"
            self.log("S5", P1, "all", "comparison_announcement",
                     {"result": "NotAllEqual", "round": 1})
            return self._report("NotAllEqual", pairwise)
        pairwise["M2vsM3"] = "equal"
        if self.rng.random() < 0.5:
            c13 = xor_bits(self.p1.ciphertext, self.p3.ciphertext)
            self.log("S5", P1, P2, "ciphertext", {"c13": c13})
            diff = xor_bits(self.p2.key, c13)
            verdict = "equal" if "1" not in diff else "unequal"
            pairwise["M1vsM3"] = verdict
            pairwise["M1vsM2"] = verdict  # implied by M2 = M3
            announcer = P2
        else:
            c12 = xor_bits(self.p1.ciphertext, self.p2.ciphertext)
            self.log("S5", P1, P3, "ciphertext", {"c12": c12})
            diff = xor_bits(self.p3.key, c12)
            verdict = "equal" if "1" not in diff else "unequal"
            pairwise["M1vsM2"] = verdict
            pairwise["M1vsM3"] = verdict
            announcer = P3
        self.log("S5", announcer, "all", "comparison_announcement",
                 {"result": verdict, "round": 2})
        outcome = "AllEqual" if all(v == "equal" for v in pairwise.values()) \
            else "NotAllEqual"
        return self._report(outcome, pairwise)

    def _report(self, outcome, pairwise) -> SessionReport:
        return SessionReport(outcome, pairwise, self.transcript, dict(self.stats))

    # -- orchestration -------------------------------------------------

    def run(self) -> SessionReport:
        payload2, payload3 = self.s1_prepare()
        payload2, rep2 = chan.transmit(payload2, self.cfg.channel_p2, self.rng)
        payload3, rep3 = chan.transmit(payload3, self.cfg.channel_p3, self.rng)

        ok2, _ = self.s2_decoy_check(P2, payload2, rep2)
        ok3, _ = self.s2_decoy_check(P3, payload3, rep3)
        if not (ok2 and ok3):
            return self._report("AbortedDecoyCheck",
                                {"M2vsM3": "unknown", "M1vsM3": "unknown",
                                 "M1vsM2": "unknown"})

        delivered2 = {payload2.slots[p].state_index
                      for p in rep2.delivered_positions
                      if payload2.slots[p].kind == "pair"}
        delivered3 = {payload3.slots[p].state_index
                      for p in rep3.delivered_positions
                      if payload3.slots[p].kind == "pair"}
        self._survivors = sorted(delivered2 & delivered3)
        self.stats["lost_states"] = self.cfg.num_states - len(self._survivors)

        ok, _ = self.s3_sample_check()
        if not ok:
            return self._report("AbortedSampleCheck",
                                {"M2vsM3": "unknown", "M1vsM3": "unknown",
                                 "M1vsM2": "unknown"})
        self.s4_extract_keys()
        return self.s5_compare()


def run_session(cfg: SessionConfig, m1: str, m2: str, m3: str,
                p1_attack=None) -> SessionReport:
    """Execute S1-S5 once; aborts are reported, never retried."""
    return Session(cfg, m1, m2, m3, p1_attack=p1_attack).run()


def plaintext_comparison(m1: str, m2: str, m3: str) -> str:
    """Oracle the protocol outcome is checked against."""
    return "AllEqual" if m1 == m2 == m3 else "NotAllEqual"


def write_transcript(report: SessionReport, path) -> None:
    with open(path, "w") as fh:
        for msg in report.transcript:
            fh.write(msg.to_json() + "\n")
