"""Deterministic discrete-event simulator for low-power lossy networks.

The package models RPL route formation over simulated lossy radio links:
motes exchange trickle-timed control traffic, build a destination-oriented
DAG, forward periodic datagrams along it, and account energy and link
quality while they do. Everything runs on an integer-microsecond virtual
clock driven by a single seeded RNG, so a scenario file plus a seed fully
determines every emitted event.
"""

__version__ = "0.1.0"
