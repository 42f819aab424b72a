"""kpzkit: simulators and exact numerics for 1D KPZ-class growth.

Subpackages/modules
-------------------
growth      lattice height functions, TASEP updates, polynuclear growth
lpp         last-passage percolation and patience-sorting LIS
exact       finite-size exact laws (Toeplitz / discrete-Fredholm / transition
            determinants) for the growth models
airy        Tracy-Widom laws, Airy process joint distributions, covariances
rmt         GUE ensembles and matrix diffusions (OU, Brownian, bridge)
interlace   interlaced particle arrays (2+1 growth, Aztec shuffle) + tilings
stats       empirical CDFs, KS distances, height scaling
experiments seeded experiment runner used by the CLI and acceptance suite
"""

__version__ = "0.1.0"

from . import _kernels

__all__ = ["_kernels", "__version__"]
