"""Class polynomials of nonholomorphic modular functions via CRT and isogeny volcanoes."""

__version__ = "0.1.0"
