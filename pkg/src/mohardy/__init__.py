"""Musielak-Orlicz martingale Hardy spaces and Walsh-Fourier analysis on the dyadic grid."""

__version__ = "0.1.0"
