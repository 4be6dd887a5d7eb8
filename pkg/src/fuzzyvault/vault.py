"""Vault encoding: secret generation, CRC binding, chaff synthesis and
polynomial projection.

A vault binds a random secret to a minutia template.  The secret plus its
CRC-32 become the coefficients of a polynomial p over GF(2^32); each
selected genuine minutia contributes a true point (X, p(X)), and chaff
points with off-polynomial Y values hide which is which.  Only a reading
that lands degree+1 genuine points reproduces a coefficient string whose
trailing CRC checks out.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from random import Random
from typing import Sequence

from . import gf32
from .minutiae import InsufficientMinutiae, Minutia, Template, encode_minutia, select_minutiae

WORD_BITS = 32
WORD_BYTES = 4

# Rejection-sampling attempts per chaff point before giving up.
CHAFF_ATTEMPTS = 10_000


class LengthMismatch(ValueError):
    """Raised when a coefficient bit string has the wrong length."""


class ChaffExhausted(RuntimeError):
    """Raised when chaff constraints cannot be satisfied by rejection sampling."""


@dataclass(frozen=True)
class VaultParams:
    degree: int  # polynomial degree n; the secret is 32*n bits
    genuine_count: int  # g: genuine minutiae per vault
    chaff_count: int  # c: chaff points per vault
    points_distance: float  # minimum pixel distance between vault minutiae
    width: int
    height: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.genuine_count < self.degree + 1:
            raise ValueError("genuine_count must be at least degree + 1")
        if self.chaff_count < 0:
            raise ValueError("chaff_count must be >= 0")
        if self.points_distance < 0:
            raise ValueError("points_distance must be >= 0")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")

    @property
    def vault_size(self) -> int:
        return self.genuine_count + self.chaff_count


@dataclass(frozen=True)
class VaultPoint:
    """One (X, Y) vault pair: X an encoded minutia, Y a field element."""

    X: int
    Y: int


@dataclass(frozen=True)
class Vault:
    params: VaultParams
    points: tuple[VaultPoint, ...]


def generate_secret(degree: int, rng: Random) -> bytes:
    """Uniform random secret of 32 * degree bits."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    bits = WORD_BITS * degree
    return rng.getrandbits(bits).to_bytes(bits // 8, "big")


def crc32_append(secret: bytes) -> bytes:
    """Secret concatenated with the big-endian CRC-32 of its bytes."""
    return secret + zlib.crc32(secret).to_bytes(WORD_BYTES, "big")


def split_coefficients(blob: bytes, degree: int) -> list[int]:
    """Cut a 32*(degree+1)-bit string into polynomial coefficients.

    The first (most significant) 32-bit chunk is the coefficient of
    x^degree; the returned list is indexed by power, so it comes back
    reversed.  With crc32_append output the CRC lands in the constant term.

    Raises:
        LengthMismatch: blob is not exactly 32*(degree+1) bits.
    """
    want = WORD_BYTES * (degree + 1)
    if len(blob) != want:
        raise LengthMismatch(f"expected {want} bytes for degree {degree}, got {len(blob)}")
    chunks = [int.from_bytes(blob[i : i + WORD_BYTES], "big") for i in range(0, want, WORD_BYTES)]
    return chunks[::-1]


def join_coefficients(coefficients: Sequence[int]) -> bytes:
    """Inverse of split_coefficients: highest power first."""
    return b"".join(c.to_bytes(WORD_BYTES, "big") for c in reversed(coefficients))


def secret_polynomial(secret: bytes, degree: int) -> list[int]:
    """The CRC-protected polynomial a vault binds to the given secret."""
    return split_coefficients(crc32_append(secret), degree)


def generate_chaff(genuine: Sequence[Minutia], params: VaultParams, rng: Random) -> list[Minutia]:
    """Draw chaff minutiae that blend in with the genuine ones.

    Each chaff point is uniform in-bounds, keeps points_distance to every
    vault minutia placed before it, encodes to a word at least half the
    smallest genuine encoding (so chaff cannot be skimmed off the bottom
    of the X range), and never collides with another vault encoding.

    Raises:
        ChaffExhausted: a point failed CHAFF_ATTEMPTS rejection draws.
    """
    if not genuine:
        raise ValueError("genuine minutiae required before placing chaff")
    placed = [(m.x, m.y) for m in genuine]
    reps = {encode_minutia(m) for m in genuine}
    min_rep = min(reps)
    min_d2 = params.points_distance**2
    chaff: list[Minutia] = []
    for _ in range(params.chaff_count):
        for _ in range(CHAFF_ATTEMPTS):
            x = rng.randrange(params.width)
            y = rng.randrange(params.height)
            if any((x - px) ** 2 + (y - py) ** 2 < min_d2 for px, py in placed):
                continue
            m = Minutia(x, y, rng.uniform(0.0, 360.0) % 360.0)
            rep = encode_minutia(m)
            if 2 * rep < min_rep or rep in reps:
                continue
            break
        else:
            raise ChaffExhausted(
                f"no admissible chaff position after {CHAFF_ATTEMPTS} attempts "
                f"(placed {len(chaff)} of {params.chaff_count})"
            )
        placed.append((x, y))
        reps.add(rep)
        chaff.append(m)
    return chaff


def encode_vault(template: Template, params: VaultParams, rng: Random) -> tuple[Vault, bytes]:
    """Lock a fresh secret under the template's best minutiae.

    Returns the vault together with the secret so tests and transcripts can
    verify it; production callers discard the secret (any later match
    reproduces it).  The points are uniformly shuffled, so the vault carries
    no ordering signal separating genuine from chaff.

    Raises:
        InsufficientMinutiae: template cannot supply genuine_count minutiae.
        ChaffExhausted: chaff constraints are unsatisfiable.
    """
    genuine = select_minutiae(template, params.genuine_count, params.points_distance)
    g_reps = [encode_minutia(m) for m in genuine]
    if len(set(g_reps)) != len(g_reps):
        raise InsufficientMinutiae("selected minutiae collide in their 32-bit encoding; rescan the finger")

    secret = generate_secret(params.degree, rng)
    coeffs = secret_polynomial(secret, params.degree)
    points = [VaultPoint(rep, gf32.poly_eval(coeffs, rep)) for rep in g_reps]

    for m in generate_chaff(genuine, params, rng):
        rep = encode_minutia(m)
        on_curve = gf32.poly_eval(coeffs, rep)
        y = rng.getrandbits(WORD_BITS)
        while y == on_curve:
            y = rng.getrandbits(WORD_BITS)
        points.append(VaultPoint(rep, y))

    rng.shuffle(points)
    return Vault(params, tuple(points)), secret


def genuine_indices(vault: Vault, secret: bytes) -> tuple[int, ...]:
    """Positions of the on-polynomial points; the generation transcript.

    Only callable by whoever knows the secret, i.e. tests and analysis.
    """
    coeffs = secret_polynomial(secret, vault.params.degree)
    return tuple(i for i, pt in enumerate(vault.points) if gf32.poly_eval(coeffs, pt.X) == pt.Y)


def vault_to_dict(vault: Vault) -> dict:
    """JSON-ready form of a vault for local files; carries its parameters."""
    p = vault.params
    return {
        "params": {
            "n": p.degree,
            "g": p.genuine_count,
            "c": p.chaff_count,
            "pd": p.points_distance,
            "width": p.width,
            "height": p.height,
        },
        "points": [[pt.X, pt.Y] for pt in vault.points],
    }


def vault_from_dict(data: dict) -> Vault:
    try:
        raw = data["params"]
        params = VaultParams(
            degree=raw["n"],
            genuine_count=raw["g"],
            chaff_count=raw["c"],
            points_distance=raw["pd"],
            width=raw["width"],
            height=raw["height"],
        )
        points = tuple(VaultPoint(int(x), int(y)) for x, y in data["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed vault document: {exc}") from exc
    if len(points) != params.vault_size:
        raise ValueError(f"expected {params.vault_size} points, found {len(points)}")
    return Vault(params, points)
