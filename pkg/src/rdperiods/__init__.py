"""Rapid-decay homology, irregular de Rham dimensions and periods for good
rank-one local models, with exact and numerical verification tools.

Modules:

- ``local_model``: models exp(x1^-m1 x2^-m2 u), dimension tables, Stokes set.
- ``stokes_topology``: cellular chain complexes for the rapid-decay quotients.
- ``laurent_ops``: truncated coefficient-recursion operators and their
  stabilized kernel and cokernel dimensions.
- ``chg_symbolic``: exact de Rham relations and connection matrices of the
  confluent hypergeometric example.
- ``periods_numeric``: its periods over the chamber cycle.
- ``cli`` / ``report`` / ``acceptance``: command line, reports, acceptance checks.
"""

__version__ = "0.1.0"
