"""5G NR physical-layer jamming and spoofing threat assessment."""

__version__ = "0.1.0"
