"""
Coherence and discord of small states
=====================================

The relative entropy of coherence measures how far a state sits from its
own dephased version. Discord measures what dephasing does to the
correlations, once the local losses are subtracted.
"""

import numpy as np

from cohdisc import (
    ProductBasis, QState, coherence, global_discord, global_discord_at, partial_trace,
    random_state,
)

# |+> carries one full bit of coherence; any diagonal state carries none.
plus = QState.from_ket([1, 1])
print("C(|+>)          =", coherence(plus))
print("C(diag(.3, .7)) =", coherence(QState((2,), np.diag([0.3, 0.7]))))

# The same state is incoherent in its own eigenbasis.
h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
print("C(|+>) in the Hadamard basis =", coherence(plus, ProductBasis((h,))))

# Coherence of a joint state splits into the local coherences plus the
# global discord measured in the same basis.
rho = random_state((2, 2), seed=3)
local = sum(coherence(partial_trace(rho, [k])) for k in range(2))
print(f"C(rho) = {coherence(rho):.6f} = {local:.6f} + {global_discord_at(rho):.6f}")

# Minimizing over product bases gives the basis-free discord.
res = global_discord(rho)
print(f"minimized global discord {res.value:.6f} after {res.evaluations} evaluations")
