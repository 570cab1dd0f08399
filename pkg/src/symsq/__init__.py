"""Numerical verification toolkit for the second moment of symmetric-square L-functions.

Modules: modmath (residue arithmetic), expsums (Gauss and character sums),
deltasym (delta-symbol expansion), oscint (oscillatory integrals, Bessel and
Mellin transforms), voronoi (Poisson and Voronoi summation), sieve (large
sieve and quadruple counts), lfun (coefficients and L-values), audit (staged
decomposition check), suites and cli (command line).
"""

__version__ = "0.1.0"
