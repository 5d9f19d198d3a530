"""safelc: a workbench for the safe lambda calculus.

Safety type-checking with verdict levels, substitution with and without
renaming, block reduction that preserves safety, Church encodings of
numbers and words, a QBF-to-term reduction, and traversal-based
evaluation over computation trees.
"""

__version__ = "0.1.0"
