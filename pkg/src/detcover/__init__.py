"""detcover: covering rational points of bounded height on analytic curves by
algebraic hypersurfaces, with exact interpolation determinants and
Weierstrass-division certificates."""

__version__ = "0.1.0"
