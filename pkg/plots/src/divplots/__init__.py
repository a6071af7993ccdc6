"""Offline figure rendering for dival experiment artifacts.

Reads only the documented CSV/JSON schemas produced by the `dival` CLI
and never recomputes any mathematics.
"""

__version__ = "0.1.0"
