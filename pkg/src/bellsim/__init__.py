"""Simulation toolkit for a nearly deterministic linear-optical Bell measurement.

Logical qubits are N-photon GHZ states, ``|0_L> = |+>^N`` and
``|1_L> = |->^N``. The package covers the two-photon Bell measurement device,
the logical Bell measurement built from N of them, photon loss, teleportation
based gates, a comparison with competing schemes, and a concatenated-code
threshold estimate.
"""

__version__ = "0.1.0"
