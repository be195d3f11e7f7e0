"""braket-rhs: bra-ket algebra for identical-particle systems in finite dimension."""
__version__ = "0.1.0"
