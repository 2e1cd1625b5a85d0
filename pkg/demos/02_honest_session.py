"""One honest comparison session, narrated step by step.

Three parties learn whether their private bit strings are all equal --
and nothing else. P1 distributes entangled pairs (keeping one pair of
qubits per state itself), decoys guard the channels, a sampled subset of
states checks P1's honesty, and the surviving states yield one-time-pad
keys satisfying K1 xor K2 xor K3 = 0.
"""

from qpcsim import Session, SessionConfig

m1, m2, m3 = "101101", "101101", "101101"
cfg = SessionConfig(l=6, delta=2, d=3, seed=42)
print(f"secrets: M1={m1} M2={m2} M3={m3}")
print(f"states prepared: {cfg.num_states} "
      f"({cfg.num_key_states} for keys + {cfg.delta} samples), "
      f"{cfg.d} decoys per payload")

session = Session(cfg, m1, m2, m3)
report = session.run()

print("\nderived keys (Bell outcomes, two bits per state):")
for party in (session.p1, session.p2, session.p3):
    print(f"  {party.name}: key={party.key}  ciphertext={party.ciphertext}")

k = int(session.p1.key, 2) ^ int(session.p2.key, 2) ^ int(session.p3.key, 2)
print("key XOR law K1^K2^K3 =", format(k, "b"))

print("\noutcome:", report.outcome)
print("pairwise verdicts:", report.pairwise)

print("\ntranscript (classical and quantum messages):")
for msg in report.transcript:
    tag = "[Q]" if msg.channel == "quantum" else "   "
    print(f"  {tag} {msg.step} {msg.sender}->{msg.receiver}: {msg.kind}")

print("\nnow with a differing secret:")
report2 = Session(SessionConfig(l=6, seed=43), m1, m2, "101100").run()
print("outcome:", report2.outcome, "|", report2.pairwise)
