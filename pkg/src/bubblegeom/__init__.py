"""Planar arc-bounded cluster geometry.

Exact perimeter and area computation for clusters bounded by circular arcs,
weighted perimeter energies, sticky-disk contact optimization, explicit
near-optimal cluster constructions, and isoperimetric lower bounds.
"""

__version__ = "0.1.0"
