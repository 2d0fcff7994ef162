"""Integer fixed-point helpers shared by the simulation core.

All combat/movement math runs on plain ints (milli-scaled where fractional)
so that two runs with the same seed produce bitwise-identical states on any
platform. Floats are allowed only in derived read-only views (observations,
rewards), never in state transitions.
"""

from __future__ import annotations

import math

MILLI = 1000

# Unit direction table for the 16 discretized angles (index i -> 2*pi*i/16),
# milli-scaled. Hardcoded so that mirroring index i -> (8 - i) % 16 negates
# the x component exactly (the engine's mirror-symmetry invariant needs this).
DIR16: tuple[tuple[int, int], ...] = (
    (1000, 0),
    (924, 383),
    (707, 707),
    (383, 924),
    (0, 1000),
    (-383, 924),
    (-707, 707),
    (-924, 383),
    (-1000, 0),
    (-924, -383),
    (-707, -707),
    (-383, -924),
    (0, -1000),
    (383, -924),
    (707, -707),
    (924, -383),
)


def sdiv(a: int, b: int) -> int:
    """Integer division truncating toward zero (symmetric in sign of `a`).

    Python's // floors, which breaks x -> -x mirror symmetry; sdiv(-a, b)
    always equals -sdiv(a, b).
    """
    if b <= 0:
        raise ValueError(f"sdiv requires positive divisor, got {b}")
    return a // b if a >= 0 else -((-a) // b)


def dist_sq(ax: int, az: int, bx: int, bz: int) -> int:
    dx = ax - bx
    dz = az - bz
    return dx * dx + dz * dz


def dist(ax: int, az: int, bx: int, bz: int) -> int:
    return math.isqrt(dist_sq(ax, az, bx, bz))


def step_toward(x: int, z: int, tx: int, tz: int, step: int) -> tuple[int, int]:
    """Move (x, z) toward (tx, tz) by `step`, clamping at the target."""
    d = dist(x, z, tx, tz)
    if d <= step or d == 0:
        return tx, tz
    return x + sdiv((tx - x) * step, d), z + sdiv((tz - z) * step, d)


def direction_index(dx: int, dz: int) -> int:
    """Quantize an integer direction vector to the nearest of the 16 angles.

    Argmax of integer dot products; ties break toward the lower index. Pure
    integer math keeps this exactly mirror-consistent for non-tied inputs.
    """
    best = 0
    best_dot = None
    for i, (ux, uz) in enumerate(DIR16):
        d = ux * dx + uz * dz
        if best_dot is None or d > best_dot:
            best_dot = d
            best = i
    return best


def mirror_direction_index(i: int) -> int:
    """Direction index under the map's x-mirror (angle theta -> pi - theta)."""
    return (8 - i) % 16


def clamp(v: int, lo: int, hi: int) -> int:
    return lo if v < lo else hi if v > hi else v
