"""Two-asset HANK solver suite: public debt, liquidity premia and inflation."""

__version__ = "0.1.0"
