"""Post-quantum epsilon-zero-knowledge protocols and an exact quantum testbed."""

__version__ = "0.1.0"
