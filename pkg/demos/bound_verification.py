"""
Randomized checks of the coherence bounds
=========================================

Each verifier draws random inputs and certified incoherent operations and
compares the discord produced with the coherence available or consumed.
A negative slack beyond 1e-6 would be a counterexample.
"""

from cohdisc import summarize, verify_result

labels = {
    1: "discord created <= coherence of the input",
    2: "global discord <= total local consumption",
    3: "asymmetric discord <= consumption in A",
}
for which, label in labels.items():
    s = summarize(verify_result(which, trials=50, seed=0))
    print(f"result {which}: {label}")
    print(f"  trials {s['trials']}, min slack {s['min_slack']:.3e}, violations {s['violations']}")
