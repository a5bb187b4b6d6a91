"""Deep embedding of user-defined algebraic data types with trace-based pattern matching."""

__version__ = "0.1.0"
