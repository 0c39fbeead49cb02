"""betafrac: beta-hypergeometric laws, partition graphs, and random
continued fractions.

Subpackages:
    specfun   hypergeometric series, signed gamma arithmetic, Thomae T
    params    parameter-domain classification and linear transforms
    dist      densities, normalization, CDF/quantile, moments, sampling
    graphs    the seven partition graphs, cycles, orbit counts
    simulate  samplers and Monte Carlo verification of the identities
    cli       command-line front-end (entry point ``betafrac``)
"""

__version__ = "0.1.0"
