"""Alignment-constrained RNN-T training and decoding for nested NER."""

__version__ = "0.1.0"
