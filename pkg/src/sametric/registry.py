"""Name lookup for every shipped metric descriptor."""

from __future__ import annotations

from . import fixtures
from .disk import DISK_D, DISK_D_TWISTED
from .metric import MetricDescriptor
from .strip import STRIP_DX, STRIP_DX_TWISTED

SPACES: dict[str, MetricDescriptor] = {
    d.name: d for d in (STRIP_DX, STRIP_DX_TWISTED, DISK_D, DISK_D_TWISTED, *fixtures.ALL)
}


def get_space(name: str) -> MetricDescriptor:
    try:
        return SPACES[name]
    except KeyError:
        raise KeyError(f"unknown space {name!r}; known: {', '.join(sorted(SPACES))}") from None
