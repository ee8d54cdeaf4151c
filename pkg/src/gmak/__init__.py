"""Analysis of generalized mass action reaction networks."""

__version__ = "0.1.0"
