"""Exact derivation and arbitrary-precision verification of Gauss
hypergeometric special values.

The package derives three-term shift relations between contiguous
hypergeometric series by exact operator composition, searches for parameter
families that collapse them to two-term recursions, telescopes those into
closed-form Pochhammer products, instantiates the 24 degenerate solution
transfers, and verifies every produced identity numerically to arbitrary
precision against an independent evaluation engine.
"""

__version__ = "0.1.0"
