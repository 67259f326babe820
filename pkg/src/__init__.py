"""superdet: sequential-measurement simulator for testing environmentally induced superdeterminism."""

__version__ = "1.0.0"
