"""Minutia data model, template ingestion and the 32-bit minutia encoding.

Templates arrive as ``.xyt`` text: one minutia per line as whitespace
separated integers ``x y theta [quality]``.  A minutia packs into one
32-bit word (x in the top 11 bits, y in the middle 11, quantized theta
in the low 10) that doubles as a field element, so locations can be
hidden among chaff in a vault.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

COORD_MAX = 2047  # 11 bits for each coordinate
THETA_STEPS = 1024  # 10 bits for orientation

_X_SHIFT = 21
_Y_SHIFT = 10
_THETA_MASK = THETA_STEPS - 1


class ParseError(ValueError):
    """Raised for malformed template text."""


class OutOfBounds(ValueError):
    """Raised when a minutia does not fit the image or the 32-bit encoding."""


class InsufficientMinutiae(Exception):
    """Raised when a template cannot supply the requested minutia count.

    The operational answer is to capture the finger again.
    """


@dataclass(frozen=True)
class Minutia:
    x: int
    y: int
    theta: float  # degrees, [0, 360)
    quality: int = 0


@dataclass(frozen=True)
class Template:
    """An ordered minutia list plus the bounds it lives in."""

    minutiae: tuple[Minutia, ...]
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        for m in self.minutiae:
            if not (0 <= m.x < self.width and 0 <= m.y < self.height):
                raise OutOfBounds(f"minutia ({m.x}, {m.y}) outside {self.width}x{self.height}")
            if m.x > COORD_MAX or m.y > COORD_MAX:
                raise OutOfBounds(f"minutia ({m.x}, {m.y}) exceeds the 11-bit coordinate range")

    def __len__(self) -> int:
        return len(self.minutiae)


def parse_template(text: str, width: int, height: int) -> Template:
    """Parse ``x y theta [quality]`` lines into a Template.

    Blank lines are skipped, a missing quality defaults to 0 and theta is
    normalized into [0, 360).

    Raises:
        ParseError: malformed fields or a wrong field count.
        OutOfBounds: coordinates outside the image or the encodable range.
    """
    minutiae = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ParseError(f"line {lineno}: expected 'x y theta [quality]', got {len(parts)} fields")
        try:
            x, y = int(parts[0]), int(parts[1])
            theta = float(parts[2])  # angles may carry decimals
            quality = int(parts[3]) if len(parts) == 4 else 0
        except ValueError as exc:
            raise ParseError(f"line {lineno}: malformed field in {line!r}") from exc
        if not math.isfinite(theta):
            raise ParseError(f"line {lineno}: non-finite angle in {line!r}")
        if not (0 <= x < width and 0 <= y < height):
            raise OutOfBounds(f"line {lineno}: ({x}, {y}) outside {width}x{height}")
        minutiae.append(Minutia(x, y, theta % 360.0, quality))
    return Template(tuple(minutiae), width, height)


def read_template(path, width: int, height: int) -> Template:
    return parse_template(Path(path).read_text(), width, height)


def select_minutiae(template: Template, count: int, points_distance: float) -> list[Minutia]:
    """Pick ``count`` well-separated minutiae, best quality first.

    Greedy scan in descending quality (ties keep file order); a minutia is
    accepted only if its distance to every already-accepted one is at
    least ``points_distance``.

    Raises:
        InsufficientMinutiae: the scan ran out before reaching ``count``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    ranked = sorted(template.minutiae, key=lambda m: -m.quality)
    min_d2 = points_distance * points_distance
    chosen: list[Minutia] = []
    for m in ranked:
        if all((m.x - c.x) ** 2 + (m.y - c.y) ** 2 >= min_d2 for c in chosen):
            chosen.append(m)
            if len(chosen) == count:
                return chosen
    raise InsufficientMinutiae(
        f"template yields {len(chosen)} separated minutiae, {count} required; rescan the finger"
    )


def encode_minutia(m: Minutia) -> int:
    """Pack a minutia into one 32-bit word: x:11 bits, y:11 bits, theta:10 bits.

    Orientation is quantized to floor(theta * 1024 / 360).

    Raises:
        OutOfBounds: coordinates over 2047 or theta outside [0, 360).
    """
    if not (0 <= m.x <= COORD_MAX and 0 <= m.y <= COORD_MAX):
        raise OutOfBounds(f"({m.x}, {m.y}) exceeds the 11-bit coordinate range")
    if not 0 <= m.theta < 360:
        raise OutOfBounds(f"theta {m.theta} outside [0, 360)")
    theta_q = int(m.theta * THETA_STEPS / 360)
    return (m.x << _X_SHIFT) | (m.y << _Y_SHIFT) | theta_q


def decode_minutia(rep: int) -> Minutia:
    """Inverse of encode_minutia up to orientation quantization; quality is 0."""
    return Minutia(
        x=(rep >> _X_SHIFT) & COORD_MAX,
        y=(rep >> _Y_SHIFT) & COORD_MAX,
        theta=(rep & _THETA_MASK) * 360.0 / THETA_STEPS,
    )
