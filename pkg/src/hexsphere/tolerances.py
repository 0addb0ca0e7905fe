"""Global numeric tolerances.

All tolerances can be scaled at once with the ``HEXSPHERE_TOL`` environment
variable (a positive float multiplier, default 1).
"""

import os

__all__ = ["EPS_LEN", "EPS_ANG", "EPS_PRUNE", "TIE_REL", "POS_REL", "ISO_REL", "scale"]


def _env_scale() -> float:
    raw = os.environ.get("HEXSPHERE_TOL")
    if raw is None:
        return 1.0
    value = float(raw)
    if not value > 0:
        raise ValueError(f"HEXSPHERE_TOL must be positive, got {raw!r}")
    return value


_SCALE = _env_scale()

#: relative tolerance on glued edge lengths
EPS_LEN = 1e-9 * _SCALE
#: absolute tolerance on angles (radians)
EPS_ANG = 1e-9 * _SCALE
#: additive slack in the corner-bound pruning rule
EPS_PRUNE = 1e-9 * _SCALE
#: geodesic tie tolerance, relative to surface diameter
TIE_REL = 1e-7 * _SCALE
#: vertex snapping tolerance for cut-locus stitching, relative to diameter
POS_REL = 1e-7 * _SCALE
#: cell isometry tolerance, relative to diameter
ISO_REL = 1e-6 * _SCALE


def scale() -> float:
    return _SCALE
