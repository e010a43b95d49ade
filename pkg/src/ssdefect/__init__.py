"""Local invariants and signed Iwasawa lambda predictions for supersingular
elliptic curves over Q in families with a fixed residual representation."""

__version__ = "0.1.0"
