"""Vault decoding: basis pairing, candidate subsets, interpolation and the
CRC unlock decision.

Every (probe basis, vault basis) pair whose orientations agree within
theta_basis_thres gets a candidate set: vault points close to some probe
minutia once both are expressed in the paired frames.  Candidate sets of
at least degree+1 points are streamed as subsets by the configured
strategy, each subset is interpolated over GF(2^32), and the first
coefficient string whose trailing CRC-32 verifies is the secret.  Chaff
points miss the polynomial by construction, so a verifying CRC certifies
an all-genuine subset (up to a 2^-32 collision).
"""

from __future__ import annotations

import itertools
import math
import time
import zlib
from dataclasses import dataclass
from random import Random
from typing import Iterator, Sequence

import numpy as np

from . import gf32
from .aligner import MatchParams, build_geometric_table, match_margins_many
from .minutiae import Template, decode_minutia, select_minutiae
from .vault import Vault, VaultPoint, WORD_BYTES, join_coefficients

ITERATIVE_SELECTION = "iterative-selection"
RANDOM_GENERATION = "random-generation"
RANDOM_SELECTION = "random-selection"
_VARIANTS = (ITERATIVE_SELECTION, RANDOM_GENERATION, RANDOM_SELECTION)

# Per basis pair, random-selection stops after this many draws unless told otherwise.
DEFAULT_ITERATION_CAP = 2**20
# random-generation refuses to materialize more subsets than this.
DEFAULT_SUBSET_BUDGET = 1_000_000

# How many vault bases to run through the threshold kernel per numpy call;
# bounds scratch memory, not results.
_BASIS_CHUNK = 64


class ArityError(ValueError):
    """Raised when a candidate set is smaller than the subset size."""


class CapacityError(RuntimeError):
    """Raised when random-generation would materialize past its budget."""


@dataclass(frozen=True)
class SubsetStrategy:
    """How candidate subsets are enumerated for interpolation.

    iterative-selection walks all combinations lexicographically
    (deterministic, exhaustive); random-generation materializes and
    shuffles them (exhaustive, memory-bound); random-selection draws
    subsets uniformly at random, repeats allowed, capped by
    iteration_cap.
    """

    variant: str
    iteration_cap: int | None = None
    subset_budget: int = DEFAULT_SUBSET_BUDGET

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; pick one of {_VARIANTS}")
        if self.iteration_cap is not None and self.iteration_cap < 1:
            raise ValueError("iteration_cap must be positive")
        if self.subset_budget < 1:
            raise ValueError("subset_budget must be positive")


DEFAULT_STRATEGY = SubsetStrategy(RANDOM_SELECTION, iteration_cap=DEFAULT_ITERATION_CAP)


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    secret: bytes | None
    bases_tried: int
    candidate_sets_evaluated: int
    interpolations_performed: int
    elapsed_seconds: float


def generate_subsets(
    candidates: Sequence[VaultPoint],
    size: int,
    strategy: SubsetStrategy,
    rng: Random | None = None,
) -> Iterator[tuple[VaultPoint, ...]]:
    """Stream size-subsets of the candidates per the strategy.

    Raises:
        ArityError: fewer candidates than the subset size.
        CapacityError: random-generation asked to materialize past budget.
    """
    candidates = tuple(candidates)
    m = len(candidates)
    if m < size:
        raise ArityError(f"{m} candidates cannot form subsets of size {size}")
    if strategy.variant != ITERATIVE_SELECTION and rng is None:
        raise ValueError(f"{strategy.variant} needs an rng")
    cap = strategy.iteration_cap

    if strategy.variant == ITERATIVE_SELECTION:
        stream: Iterator[tuple[VaultPoint, ...]] = itertools.combinations(candidates, size)
        if cap is not None:
            stream = itertools.islice(stream, cap)
        return stream

    total = math.comb(m, size)
    if strategy.variant == RANDOM_GENERATION:
        if total > strategy.subset_budget:
            raise CapacityError(
                f"{total} subsets exceed the materialization budget of {strategy.subset_budget}"
            )
        subsets = list(itertools.combinations(candidates, size))
        rng.shuffle(subsets)
        if cap is not None:
            subsets = subsets[:cap]
        return iter(subsets)

    count = total if cap is None else min(total, cap)

    def draw():
        for _ in range(count):
            yield tuple(rng.sample(candidates, size))

    return draw()


def try_unlock(subset: Sequence[VaultPoint], degree: int) -> bytes | None:
    """Interpolate a subset and check the embedded CRC; the secret on success.

    Subsets with a repeated X cannot come from distinct genuine points,
    so they are dismissed as negatives without interpolating.
    """
    pts = [(p.X, p.Y) for p in subset]
    if len({x for x, _ in pts}) != len(pts):
        return None
    coeffs = gf32.lagrange_interpolate(pts, degree)
    blob = join_coefficients(coeffs)
    body, tail = blob[:-WORD_BYTES], blob[-WORD_BYTES:]
    if zlib.crc32(body) != int.from_bytes(tail, "big"):
        return None
    return body


def decode_vault(
    vault: Vault,
    probe: Template,
    match_params: MatchParams,
    strategy: SubsetStrategy = DEFAULT_STRATEGY,
    rng: Random | None = None,
) -> MatchResult:
    """Match a probe template against a vault and recover the secret if genuine.

    Probe bases run in template order, vault bases in vault order, both
    pinned for reproducibility.  Candidates within a basis pair are tried
    strongest match first, so exhaustive strategies reach an all-genuine
    subset quickly when the alignment is right.  The first verifying
    subset short-circuits everything.

    Raises:
        InsufficientMinutiae: the probe cannot supply genuine_count minutiae.
    """
    if rng is None:
        rng = Random()
    start = time.perf_counter()
    degree = vault.params.degree
    size = degree + 1

    probe_sel = select_minutiae(probe, vault.params.genuine_count, vault.params.points_distance)
    vault_minutiae = [decode_minutia(pt.X) for pt in vault.points]
    vtable = build_geometric_table(vault_minutiae)
    ptable = build_geometric_table(probe_sel)

    d = np.abs(ptable.thetas[:, None] - vtable.thetas[None, :]) % 360.0
    basis_ok = np.minimum(d, 360.0 - d) <= match_params.theta_basis_thres

    bases_tried = 0
    sets_evaluated = 0
    interpolations = 0

    def result(matched, secret):
        return MatchResult(
            matched=matched,
            secret=secret,
            bases_tried=bases_tried,
            candidate_sets_evaluated=sets_evaluated,
            interpolations_performed=interpolations,
            elapsed_seconds=time.perf_counter() - start,
        )

    for i in range(len(probe_sel)):
        compatible = np.nonzero(basis_ok[i])[0]
        for lo in range(0, len(compatible), _BASIS_CHUNK):
            chunk = compatible[lo : lo + _BASIS_CHUNK]
            margins = match_margins_many(vtable, ptable, i, chunk, match_params)
            for row in range(len(chunk)):
                bases_tried += 1
                cand = np.nonzero(margins[row] <= 0.0)[0]
                if cand.size < size:
                    continue
                sets_evaluated += 1
                # Strongest matches first; ties keep vault order.
                order = cand[np.argsort(margins[row][cand], kind="stable")]
                pool = [vault.points[int(j)] for j in order]
                for subset in generate_subsets(pool, size, strategy, rng):
                    interpolations += 1
                    secret = try_unlock(subset, degree)
                    if secret is not None:
                        return result(True, secret)
    return result(False, None)
