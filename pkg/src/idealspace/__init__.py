"""Countably based spaces presented as ideal spaces of enumerable transitive relations."""

__version__ = "0.1.0"
