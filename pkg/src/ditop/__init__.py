"""Exact combinatorial models of directed state spaces.

Subpackages cover piecewise-linear path algebra (`reparam`), globular
complexes and their subdivisions (`gcomplex`), finite trace-space models
(`pathspace`), integer homology (`algtop`), natural systems of valued
trace spaces (`natsys`), open-map and bisimulation checking (`bisim`),
and a command-line front end (`cli`).
"""

__version__ = "0.1.0"
