"""
One clean qubit
===============

An ancilla in |+> controls u on a maximally mixed register. Reading the
ancilla gives Tr(u)/2^n, and the coherence it loses depends only on
|Tr u|/2^n.
"""

import numpy as np

from cohdisc import DQC1Config, dqc1_report, haar_unitary

rng = np.random.default_rng(1)
for n in (1, 2, 3):
    u = haar_unitary(2 ** n, rng)
    rep = dqc1_report(DQC1Config(n, u))
    exact = np.trace(u) / 2 ** n
    print(f"n={n}: estimate {rep.trace_estimate:.6f}, exact {exact:.6f}")
    print(f"     deltaC {rep.delta_c:.6f} (closed form {rep.delta_c_closed_form:.6f})")
    kind = "optimized" if rep.global_optimized else "reference-basis bound"
    print(f"     global discord {rep.global_bound.lhs:.6f} ({kind}), "
          f"asymmetric {rep.asym_bound.lhs:.6f}")

# A global phase consumes nothing and creates no discord.
rep = dqc1_report(DQC1Config(2, np.exp(0.4j) * np.eye(4)))
print("u = e^(0.4i) I:", rep.delta_c, rep.global_bound.lhs, rep.asym_bound.lhs)
