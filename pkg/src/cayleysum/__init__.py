"""Cayley sum graphs over finite fields: constructions, exact spectra via
character sums, Sidon-set and subgraph-freeness verification, and
quantitative comparison of empirical spectral measures with limit laws."""

__version__ = "0.1.0"
