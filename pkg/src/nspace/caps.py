"""Resource caps.

Every unbounded-looking loop in the package is bounded by one of these
numbers; exceeding a cap raises :class:`~nspace.errors.CapExceeded` instead of
silently truncating.  Defaults suit desk-scale inputs (points <= 64, groups
<= 64, dimension cap 4).  The ``NSPACE_CAPS`` environment variable and the
CLI ``--caps`` flag accept a comma-separated ``key=value`` list.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace, fields


@dataclass(frozen=True)
class Caps:
    max_dim: int = 4                 # hard ceiling on cube dimension
    max_points: int = 64             # points per cubespace
    max_group: int = 64              # elements per finite group
    bfs_elements: int = 1 << 20      # closure/orbit element budget
    search_nodes: int = 1_000_000    # backtracking node budget
    preimage_configs: int = 1 << 20  # configs enumerated per relative-ergodicity check
    cube_set: int = 1 << 20          # size budget for any stored cube set
    product_elements: int = 1 << 16  # elements of a combined translation group

    def check(self, what: str, needed: int, cap_name: str) -> None:
        cap = getattr(self, cap_name)
        if needed > cap:
            from .errors import CapExceeded

            raise CapExceeded(what, needed, cap)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    """Parse ``key=value,key=value`` overrides on top of *base*."""
    caps = base or Caps()
    if not text:
        return caps
    updates = {}
    valid = {f.name for f in fields(Caps)}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            from .errors import InvalidInput

            raise InvalidInput(f"bad caps item {item!r}, expected key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in valid:
            from .errors import InvalidInput

            raise InvalidInput(f"unknown cap {key!r}; known: {sorted(valid)}")
        updates[key] = int(value)
    return replace(caps, **updates)


def default_caps() -> Caps:
    """Caps from the environment (``NSPACE_CAPS``) or the defaults."""
    return parse_caps(os.environ.get("NSPACE_CAPS", ""))
