"""Detect control-flow feature interactions in #ifdef-annotated C, learn
performance interactions from benchmarks, and relate the two."""

__version__ = "0.1.0"
