"""Response-reception evaluation core (C++ extension)."""

from ._reception import *  # noqa: F401,F403
from ._reception import (
    CapabilityError,
    ReceptionError,
    TransportError,
    ValidationError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
