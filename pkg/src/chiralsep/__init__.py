"""Toolkit for quantifying how molecular rotation affects laser-based
enantioseparation of chiral symmetric-top molecules."""

__version__ = "0.1.0"
