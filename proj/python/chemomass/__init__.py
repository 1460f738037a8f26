"""Radial chemotaxis with indirect signal production.

Thin wrapper over the compiled ``_core`` extension. Masses may be passed as
plain numbers; ``pi`` is re-exported for convenience.
"""

from ._core import *  # noqa: F401,F403
from ._core import pi, Verdict

__all__ = [name for name in dir() if not name.startswith("_")]


def critical_mass(delta=1.0):
    """Mass 8 pi delta separating bounded and growing radial solutions."""
    return 8.0 * pi * delta
