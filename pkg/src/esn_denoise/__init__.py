"""Echo state network denoising of skew tent map chaotic signals."""

__version__ = "0.1.0"
