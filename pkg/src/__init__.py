"""
Quantum-walk Graph Kernels

Aligned entropic reproducing kernels (AERK) for graph classification, built
on continuous-time quantum walk entropies and depth-based vertex alignment,
with the DBMK and RGK baselines and a kernel k-NN evaluation harness.
"""

__version__ = "0.1.0"
