"""
Two small machines, solved exactly
==================================

Both machines emit the same per-state symbol probabilities.  They differ
only in where the arcs point, and that single difference decides whether
an observer can ever pin down the hidden state.
"""

import numpy as np

from syncrate.pfsa import (
    analytical_entropy_rate,
    evolve,
    stationary_distribution,
    two_state_nonsynchronizable,
    two_state_synchronizable,
)

sync = two_state_synchronizable()
nonsync = two_state_nonsynchronizable()

print("stationary distributions")
print("  synchronizable    ", stationary_distribution(sync))
print("  non-synchronizable", stationary_distribution(nonsync))

print("exact entropy rates, bits per symbol")
print("  synchronizable     %.6f" % analytical_entropy_rate(sync))
print("  non-synchronizable %.6f" % analytical_entropy_rate(nonsync))

# Start from total ignorance: the stationary mix over states.  On the
# synchronizable machine one observed symbol collapses the distribution
# onto a single state.
start = stationary_distribution(sync)
print("\nafter observing '0' on the synchronizable machine:",
      evolve(sync, start, (0,)))
print("after observing '1':", evolve(sync, start, (1,)))

# On the other machine a '1' swaps the state mass instead of collapsing
# it.  Long runs of '0' do concentrate belief, but no finite word ever
# reaches a corner of the simplex exactly.
start = stationary_distribution(nonsync)
for word in [(0,), (1,), (1, 1, 0, 1)]:
    dist = evolve(nonsync, start, word)
    print("non-synchronizable after", word, "->", np.round(dist, 6))
