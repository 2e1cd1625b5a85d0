"""Quantum channel models: ideal, lossy, depolarizing-noisy, adversary-tapped.

Loss drops whole payload slots (a decoy, or an entangled pair as a unit);
noise depolarizes each transmitted qubit independently. A tapped channel
invokes an adversary hook on every slot before handing it to the wrapped
model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .payload import QuantumPayload
from .statevec import PAULI_X, PAULI_Y, PAULI_Z

_PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class ChannelModel:
    kind: str  # "ideal" | "lossy" | "noisy" | "tapped"
    p: float = 0.0
    adversary: object = None
    inner: "ChannelModel" = None

    def __post_init__(self):
        if self.kind not in ("ideal", "lossy", "noisy", "tapped"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability out of range: {self.p}")
        if self.kind == "tapped":
            if self.adversary is None:
                raise ValueError("tapped channel needs an adversary")
            if self.inner is not None and self.inner.kind == "tapped":
                raise ValueError("tapped nesting depth is at most 1")


def ideal() -> ChannelModel:
    return ChannelModel("ideal")


def lossy(p_loss: float) -> ChannelModel:
    return ChannelModel("lossy", p=p_loss)


def noisy(p_noise: float) -> ChannelModel:
    return ChannelModel("noisy", p=p_noise)


def tapped(adversary, inner: ChannelModel = None) -> ChannelModel:
    return ChannelModel("tapped", adversary=adversary, inner=inner or ideal())


@dataclass
class DeliveryReport:
    delivered_positions: list = field(default_factory=list)
    lost_positions: list = field(default_factory=list)


def transmit(payload: QuantumPayload, model: ChannelModel, rng):
    """Send a payload through a channel; returns (payload', DeliveryReport).

    The returned payload keeps the original positions; lost slots are
    replaced by None so position bookkeeping survives the loss.
    """
    if model.kind == "tapped":
        for slot in payload.slots:
            if slot is not None:
                model.adversary.on_slot(slot, rng)
        return transmit(payload, model.inner, rng)

    delivered, lost = [], []
    out_slots = []
    for pos, slot in enumerate(payload.slots):
        if slot is None:
            out_slots.append(None)
            lost.append(pos)
            continue
        if model.kind == "lossy" and rng.random() < model.p:
            out_slots.append(None)
            lost.append(pos)
            continue
        if model.kind == "noisy":
            for lab in slot.labels:
                if rng.random() < model.p:
                    slot.system.apply(_PAULIS[int(rng.integers(3))], (lab,))
        out_slots.append(slot)
        delivered.append(pos)
    return QuantumPayload(out_slots), DeliveryReport(delivered, lost)


def honest_qber(p_noise: float) -> float:
    """Decoy error probability of an honest noisy channel.

    Under single-qubit depolarizing noise a decoy measured in its
    preparation basis errs iff the applied Pauli flips it: two of the
    three Paulis do, hence 2p/3.
    """
    if not 0.0 <= p_noise <= 1.0:
        raise ValueError(f"p_noise out of range: {p_noise}")
    return 2.0 * p_noise / 3.0


def decoy_threshold(p_noise: float) -> float:
    """Default decoy-error threshold: midpoint of honest QBER and the 25%
    intercept-resend signature."""
    return (honest_qber(p_noise) + 0.25) / 2.0


def parse_channel_spec(text: str) -> ChannelModel:
    """Channel grammar: ideal | lossy:P | noisy:P | tapped:ADV[+INNER]."""
    text = text.strip()
    if text == "ideal":
        return ideal()
    if text.startswith("lossy:"):
        return lossy(float(text.split(":", 1)[1]))
    if text.startswith("noisy:"):
        return noisy(float(text.split(":", 1)[1]))
    if text.startswith("tapped:"):
        rest = text.split(":", 1)[1]
        if "+" in rest:
            adv_name, inner_spec = rest.split("+", 1)
            inner = parse_channel_spec(inner_spec)
        else:
            adv_name, inner = rest, ideal()
        from .adversary import make_outside_adversary
        return tapped(make_outside_adversary(adv_name), inner)
    raise ValueError(f"unparseable channel spec {text!r}")
