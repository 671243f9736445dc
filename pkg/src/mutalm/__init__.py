"""mutalm: mutation testing for MiniJ with masked-token predictions."""

__version__ = "0.1.0"
