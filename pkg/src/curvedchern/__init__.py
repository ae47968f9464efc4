"""Exact Chern characters of graded matrix factorizations, two ways.

The engine computes the Chern character of a perfect module over a curved
algebra twice — once from curvature data (a Chern-Weil supertrace of
exp(-R)) and once through a connection-dependent trace on Hochschild-style
chains — and checks the two answers agree coefficient by coefficient.
All arithmetic is exact over Q(i).
"""

from __future__ import annotations

__version__ = "0.1.0"
