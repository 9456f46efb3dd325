"""kplab: exact-arithmetic laboratory for lattice KP tau functions and reductions."""

__version__ = "0.1.0"
