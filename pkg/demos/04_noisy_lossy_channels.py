"""Imperfect channels: loss, depolarizing noise, and telling noise from spies.

Loss drops whole payload slots; the protocol sacrifices spare states and
still compares correctly on what arrives. Depolarizing noise raises the
decoy error rate to 2p/3 -- comfortably below the 25% signature an
intercept-resend attacker leaves, so a threshold separates the two.
"""

import numpy as np

from qpcsim import InterceptResend, SessionConfig, channels, run_session
from qpcsim.payload import PayloadSlot, QuantumPayload, QubitSystem
from qpcsim.protocol import InsufficientStates
from qpcsim.statevec import single_qubit_state, x_basis, z_basis

print("=== lossy channels ===")
for p_loss in (0.1, 0.3, 0.5):
    completed = correct = 0
    for seed in range(60):
        cfg = SessionConfig(l=4, delta=6, d=2, seed=seed,
                            channel_p2=channels.lossy(p_loss),
                            channel_p3=channels.lossy(p_loss))
        try:
            report = run_session(cfg, "1010", "1010", "1010")
        except InsufficientStates:
            continue
        completed += 1
        correct += report.outcome == "AllEqual"
    print(f"  p_loss={p_loss}: {completed}/60 sessions completed, "
          f"{correct}/{completed} correct")

print("\n=== noisy channels: decoy error rate is 2p/3 ===")
rng = np.random.default_rng(0)
for p in (0.03, 0.1335, 0.3):
    errors = 0
    n = 4000
    for i in range(n):
        name = "01+-"[int(rng.integers(4))]
        check, bit = {"0": (z_basis(1), 0), "1": (z_basis(1), 1),
                      "+": (x_basis(1), 0), "-": (x_basis(1), 1)}[name]
        slot = PayloadSlot("decoy", QubitSystem(single_qubit_state(name, "d")),
                           ("d",))
        out, _ = channels.transmit(QuantumPayload([slot]),
                                   channels.noisy(p), rng)
        errors += out.slots[0].system.measure(("d",), check,
                                              rng).outcome_index != bit
    print(f"  p={p}: measured QBER {errors / n:.4f}, "
          f"predicted 2p/3 = {channels.honest_qber(p):.4f}")

print("\n=== noise vs eavesdropper at the benchmark QBER of 8.9% ===")
p_bench = 0.1335
thr = channels.decoy_threshold(p_bench)
print(f"  threshold = midpoint(2p/3, 0.25) = {thr:.4f}")
honest = channels.noisy(p_bench)
attacked = channels.tapped(InterceptResend(), inner=channels.noisy(p_bench))
for label, model in (("honest", honest), ("attacked", attacked)):
    rates = []
    for run in range(20):
        errors = 0
        d = 200
        for i in range(d):
            name = "01+-"[int(rng.integers(4))]
            check, bit = {"0": (z_basis(1), 0), "1": (z_basis(1), 1),
                          "+": (x_basis(1), 0), "-": (x_basis(1), 1)}[name]
            slot = PayloadSlot("decoy",
                               QubitSystem(single_qubit_state(name, "d")),
                               ("d",))
            out, _ = channels.transmit(QuantumPayload([slot]), model, rng)
            errors += out.slots[0].system.measure(("d",), check,
                                                  rng).outcome_index != bit
        rates.append(errors / d)
    flagged = sum(r > thr for r in rates)
    print(f"  {label:8s}: decoy error {np.mean(rates):.3f} "
          f"+- {np.std(rates):.3f}, flagged {flagged}/20")
