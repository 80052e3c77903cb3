"""Matched-window OFDM sensing and discrete NLFM waveform synthesis."""

__version__ = "0.1.0"
