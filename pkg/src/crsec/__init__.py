"""
crsec: secrecy sum rate optimization for cooperative rate-splitting

Designs the precoders and the common-rate split of a two-user downlink where
the stronger user relays the common stream, and compares the result against
non-cooperative rate-splitting, multi-user linear precoding and cooperative
NOMA on Rayleigh channels.
"""

__version__ = "1.0.0"
__author__ = "crsec developers"

from .cli.main import app

__all__ = ["app"]
