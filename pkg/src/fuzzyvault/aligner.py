"""Geometric-hashing alignment between a probe template and vault minutiae.

Absolute pose is useless across captures, so matching happens in
basis-relative frames: every minutia takes a turn as the origin, the
remaining points are rigidly transformed so the basis sits at (0, 0)
pointing along +x, and two captures of the same finger then agree in at
least one shared basis frame no matter how the finger was shifted or
rotated on the sensor.

Tables are dense (no hash buckets): coordinates stay real-valued and all
orientation comparisons are circular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .minutiae import Minutia
from .vault import VaultPoint


@dataclass(frozen=True)
class MatchParams:
    x_thres: float  # pixels
    y_thres: float  # pixels
    theta_thres: float  # degrees, circular
    theta_basis_thres: float  # degrees; >= 180 disables basis pruning

    def __post_init__(self):
        for name in ("x_thres", "y_thres", "theta_thres", "theta_basis_thres"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.theta_thres >= 180:
            raise ValueError("theta_thres must be < 180 (circular distance caps there)")
        if self.theta_basis_thres > 360:
            raise ValueError("theta_basis_thres must be <= 360")


@dataclass(frozen=True)
class TransformedMinutia:
    x: float
    y: float
    theta: float
    origin_index: int  # index of the untransformed source point


def rigid_transform(basis: Minutia, m: Minutia, origin_index: int = 0) -> TransformedMinutia:
    """Express m in the frame whose origin is basis, oriented along basis.theta."""
    b = math.radians(basis.theta)
    cb, sb = math.cos(b), math.sin(b)
    dx = m.x - basis.x
    dy = m.y - basis.y
    return TransformedMinutia(
        x=cb * dx + sb * dy,
        y=-sb * dx + cb * dy,
        theta=(m.theta - basis.theta) % 360.0,
        origin_index=origin_index,
    )


class GeometricTable:
    """All basis-relative views of a minutia list.

    Row i holds every minutia transformed into the frame of basis i, so
    ``entries[i][i]`` is always the exact zero transform.  The raw
    coordinates live in ``coords`` (shape k x k x 3, last axis x/y/theta)
    for bulk threshold work; ``entries`` materializes TransformedMinutia
    objects on demand.
    """

    def __init__(self, sources: Iterable[Minutia]):
        self.sources = tuple(sources)
        k = len(self.sources)
        if k == 0:
            raise ValueError("at least one minutia required")
        xs = np.array([m.x for m in self.sources], dtype=float)
        ys = np.array([m.y for m in self.sources], dtype=float)
        thetas = np.array([m.theta for m in self.sources], dtype=float)
        dx = xs[None, :] - xs[:, None]
        dy = ys[None, :] - ys[:, None]
        b = np.radians(thetas)[:, None]
        cb, sb = np.cos(b), np.sin(b)
        coords = np.empty((k, k, 3))
        coords[..., 0] = cb * dx + sb * dy
        coords[..., 1] = -sb * dx + cb * dy
        coords[..., 2] = (thetas[None, :] - thetas[:, None]) % 360.0
        coords.setflags(write=False)
        self.coords = coords
        self.thetas = thetas

    def __len__(self) -> int:
        return len(self.sources)

    def row(self, i: int) -> list[TransformedMinutia]:
        return [
            TransformedMinutia(float(x), float(y), float(t), j)
            for j, (x, y, t) in enumerate(self.coords[i])
        ]

    @cached_property
    def entries(self) -> tuple[tuple[TransformedMinutia, ...], ...]:
        return tuple(tuple(self.row(i)) for i in range(len(self)))


def build_geometric_table(minutiae: Iterable[Minutia]) -> GeometricTable:
    return GeometricTable(minutiae)


def circular_diff(a: float, b: float) -> float:
    """Smaller arc between two angles in degrees; always in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def match_margins(
    vault_table: GeometricTable,
    probe_table: GeometricTable,
    probe_basis: int,
    vault_basis: int,
    params: MatchParams,
) -> np.ndarray:
    """Per-vault-point slack against the matching thresholds.

    Entry j is min over probe minutiae of max(|dx| - x_thres,
    |dy| - y_thres, circ(dtheta) - theta_thres) in the paired basis
    frames; <= 0 means vault point j matches some probe minutia.
    """
    return match_margins_many(vault_table, probe_table, probe_basis, [vault_basis], params)[0]


def match_margins_many(
    vault_table: GeometricTable,
    probe_table: GeometricTable,
    probe_basis: int,
    vault_bases: Sequence[int],
    params: MatchParams,
) -> np.ndarray:
    """match_margins for several vault bases at once; shape (len(bases), kv)."""
    P = probe_table.coords[probe_basis]  # (kp, 3)
    V = vault_table.coords[np.asarray(vault_bases, dtype=int)]  # (m, kv, 3)
    dx = np.abs(V[:, None, :, 0] - P[None, :, None, 0]) - params.x_thres
    dy = np.abs(V[:, None, :, 1] - P[None, :, None, 1]) - params.y_thres
    dt = np.abs(V[:, None, :, 2] - P[None, :, None, 2]) % 360.0
    dt = np.minimum(dt, 360.0 - dt) - params.theta_thres
    return np.maximum(np.maximum(dx, dy), dt).min(axis=1)


def collect_candidates(
    vault_table: GeometricTable,
    vault_points: Sequence[VaultPoint],
    probe_table: GeometricTable,
    probe_basis: int,
    vault_basis: int,
    params: MatchParams,
) -> set[VaultPoint]:
    """Vault points within thresholds of at least one transformed probe minutia.

    Works in the paired frames of the two given bases; the caller is
    responsible for only pairing bases whose orientations agree within
    theta_basis_thres.
    """
    margins = match_margins(vault_table, probe_table, probe_basis, vault_basis, params)
    return {vault_points[j] for j in np.nonzero(margins <= 0.0)[0]}
