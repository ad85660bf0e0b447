"""Deviation statistics of empirical Gaussian marginals over sphere point sets.

The library computes, at desk scale and with fully reproducible seeding:

* high-accuracy standard-normal analytics (CDF, density, quantile) and the
  probability/quantile grids built on them,
* generators for finite point sets on the unit sphere (grids, caps, the
  near-collapsed construction used by the Rademacher counterexample),
* covering numbers, admissible sequences and chaining-functional upper
  bounds, a single-scale entropy lower functional, and sparse-sphere covers,
* exact Kolmogorov-Smirnov and variance-weighted deviation statistics of
  sorted Gaussian projections, uniform envelope checks, and the two-cone
  half-space disagreement probability,
* quantile-coupling Wasserstein-2 distances and the sorted-coordinate
  statistic against the Gaussian quantile grid,
* seeded Monte Carlo experiment drivers with CSV/JSON outputs and a CLI.
"""

from gaussdkw.errors import ConfigError, DomainError, ResourceError

__version__ = "0.1.0"

__all__ = ["ConfigError", "DomainError", "ResourceError", "__version__"]
