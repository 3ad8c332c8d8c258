"""Environment-driven settings for lpsphere.

Constants are read once at import, except the tolerance, which the CLI and
tests override at run time through LP_SPHERE_TOL.
"""

import os

DEFAULT_TOLERANCE_RAW = "1e-9"

LOG_LEVEL = os.environ.get("LP_SPHERE_LOG_LEVEL", "INFO").upper()

# Fincke-Pohst: total tree nodes visited before giving up, and frontier size per chunk.
ENUM_NODE_BUDGET = int(os.environ.get("LP_SPHERE_ENUM_BUDGET", "50000000"))
ENUM_CHUNK = int(os.environ.get("LP_SPHERE_ENUM_CHUNK", "1000000"))

RADIAL_MAX_PANELS = int(os.environ.get("LP_SPHERE_MAX_PANELS", "200000"))
LAGUERRE_MAX_NODES = int(os.environ.get("LP_SPHERE_MAX_LAGUERRE_NODES", "1024"))
BGF_MAX_NODES = int(os.environ.get("LP_SPHERE_MAX_NODES", "6400"))

WORKERS = int(os.environ.get("LP_SPHERE_WORKERS", "4"))

QSERIES_DEFAULT_K = 25
JSON_SCHEMA_VERSION = "lpsphere/1"


def default_tolerance() -> float:
    """Tolerance for checks; LP_SPHERE_TOL overrides the built-in 1e-9."""
    raw = os.environ.get("LP_SPHERE_TOL", DEFAULT_TOLERANCE_RAW).strip()
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"LP_SPHERE_TOL must be a number, got {raw!r}") from None
    if not value > 0:
        raise ValueError(f"LP_SPHERE_TOL must be positive, got {raw!r}")
    return value
