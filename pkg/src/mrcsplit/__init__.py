"""Corpus splitting and analysis toolchain for reading comprehension
datasets: question truncation and sentence-overlap heuristics, external
prediction scoring, easy/hard partitioning, blinded annotation, and
tabular reports."""

__version__ = "0.1.0"
