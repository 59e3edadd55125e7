"""High-temperature limits of discrete beta-ensembles.

Exact moment/cumulant machinery, hypergeometric root finding and Jacobi
spectra, crystallized limit densities, and Metropolis sampling of pure Jack
measures, with a CLI front end (``htjack``).
"""

__version__ = "0.1.0"
