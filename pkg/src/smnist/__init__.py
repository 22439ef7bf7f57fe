"""SMNIST numerosity workbench.

Generates the SMNIST family of numerosity datasets in MNIST-compatible IDX
binary format, validates them against combinatorial ground truth, trains
small from-scratch classifiers on them, and runs the live human subitizing
test (levels, streaks, heuristic score) behind an HTTP service.
"""

__version__ = "0.1.0"
