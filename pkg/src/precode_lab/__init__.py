"""Downlink MU-MIMO precoding lab: RZF, per-group RZF, Tomlinson-Harashima
and hybrid linear/THP precoders over a correlated one-ring channel, with a
Monte-Carlo BER engine and closed-form FLOP counts."""

__version__ = "0.1.0"
