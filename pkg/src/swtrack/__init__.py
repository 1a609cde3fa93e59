"""Switched-system tracking controller toolbox.

Analysis, synthesis and verification of switched state-feedback plus
feedforward controllers that achieve non-overshooting or monotonic
step-reference tracking under arbitrary switching.
"""

__version__ = "0.1.0"
