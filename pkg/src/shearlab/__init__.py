"""shearlab: numerical experiments for Robin-boundary heat flows and
shear-flow spectral instability on the half-line."""

__version__ = "0.1.0"
