"""Exact group-ring algebra and small-instance verifiers for equivariant Stark-type identities."""

__version__ = "0.1.0"
