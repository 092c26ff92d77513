"""Inverse scattering and long-time asymptotics for the WKI equation on a finite-density background."""

__version__ = "0.1.0"
