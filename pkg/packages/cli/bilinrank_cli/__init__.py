"""bilinrank CLI - Low-rank recovery from the command line."""

__version__ = "0.1.0"
