"""Simulation and analysis toolkit for DAO governance dynamics.

Threshold dynamics of two competing standards on a weighted interaction
network, fork/percolation classification, voting tallies and turnout
metrics, and an eight-principle viability rubric.
"""

from daosim.errors import ValidationError

__version__ = "0.1.0"

__all__ = ["ValidationError", "__version__"]
