"""When do two agents' state assignments admit a common origin?

Compatibility is a support-overlap question, classically and quantumly.

Run: python3 demos/02_compatibility.py
"""

import numpy as np

from statepool import (
    ProbabilityDistribution,
    classical_compatible,
    quantum_compatible,
    verify_subjective_quantum,
)


def dist(*p):
    return ProbabilityDistribution(tuple(range(len(p))), np.array(p))


# Classical: point masses on different outcomes can never be reconciled.
print(classical_compatible(dist(1, 0), dist(0, 1)).diagnostics)

# But a deterministic assignment is fine with a mixed one, as long as the
# supports overlap.
v = classical_compatible(dist(1, 0), dist(0.5, 0.5))
print("(1,0) vs (0.5,0.5):", v.compatible, "-", v.diagnostics)

# The uniform distribution is compatible with everything.
rng = np.random.default_rng(0)
p = rng.random(6)
print("uniform vs random:", classical_compatible(
    ProbabilityDistribution.uniform(tuple(range(6))),
    ProbabilityDistribution(tuple(range(6)), p / p.sum())).compatible)

# Quantum: two distinct pure states occupy different lines of the Hilbert
# space, and two lines meet only at the origin.
ket0 = np.diag([1.0, 0.0])
ketp = np.full((2, 2), 0.5)
print("\n|0> vs |+>:", quantum_compatible(ket0, ketp).diagnostics)
print("I/2 vs |0>:", quantum_compatible(np.eye(2) / 2, ket0).diagnostics)

# Subjective reading: for compatible assignments there can exist a
# measurement after which both agents hold the same posterior.  Identical
# priors agree after anything; orthogonal ones agree after nothing.
rho = np.array([[0.6, 0.1], [0.1, 0.4]])
povm = {0: np.diag([0.7, 0.2]), 1: np.diag([0.3, 0.8])}
print("\nidentical priors agree at outcome 0:",
      verify_subjective_quantum(rho, rho, povm, 0))
print("orthogonal priors agree at outcome 0:",
      verify_subjective_quantum(ket0, np.diag([0.0, 1.0]), povm, 0))
