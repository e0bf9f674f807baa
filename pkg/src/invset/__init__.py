"""Exact-arithmetic laboratory for invariant-set models of quantum ensembles.

Modules
-------
cp         exact arithmetic over the rational-complex sets C_p
bits       roots of unity as signed permutations of bit strings
padic      truncated p-adic integers as nested-disk addresses
ensemble   qubit and singlet-pair ensembles with exact frequencies
bell       CHSH on the C_p grid and the statistical-independence audit
attractor  logistic flow, limit cycle, Lorenz system, correlation dimension
cli        batch command-line front end
"""

__version__ = "0.1.0"
