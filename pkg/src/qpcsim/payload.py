"""Shared quantum registers and the payload structure sent over channels.

A QubitSystem is the one mutable object in the simulator: a holder for a
(possibly multi-party) entangled register that collapses in place when any
holder measures their qubits. Payload slots reference qubits inside such
systems by label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import statevec
from .statevec import OrthonormalBasis, StateVector


class QubitSystem:
    """Mutable holder for an entangled register shared between parties."""

    def __init__(self, state: StateVector):
        self.state = state

    @property
    def labels(self):
        return self.state.labels

    def measure(self, targets, basis: OrthonormalBasis, rng) -> statevec.MeasurementRecord:
        record, post = statevec.measure(self.state, targets, basis, rng)
        self.state = post
        return record

    def apply(self, u, targets) -> None:
        self.state = statevec.apply_unitary(self.state, u, targets)


@dataclass
class PayloadSlot:
    """One position of a quantum transmission: an entangled pair or a decoy."""

    kind: str  # "pair" | "decoy"
    system: QubitSystem
    labels: tuple
    state_index: int = -1  # resource-state sequence index; -1 for decoys

    def __post_init__(self):
        if self.kind not in ("pair", "decoy"):
            raise ValueError(f"bad slot kind {self.kind!r}")


@dataclass
class DecoyRecord:
    """P1's private record of one inserted decoy."""

    position: int
    basis: str  # "Z" | "X"
    bit: int
    state_name: str


@dataclass
class QuantumPayload:
    """Ordered slots as transmitted; decoy bookkeeping stays with the sender."""

    slots: list = field(default_factory=list)

    def positions(self):
        return list(range(len(self.slots)))

    def decoy_positions(self):
        return [i for i, s in enumerate(self.slots) if s.kind == "decoy"]

    def pair_positions(self):
        return [i for i, s in enumerate(self.slots) if s.kind == "pair"]
