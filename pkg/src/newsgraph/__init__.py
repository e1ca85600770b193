"""Document-grounded news chat over dependency-parsed articles."""

__version__ = "0.1.0"
