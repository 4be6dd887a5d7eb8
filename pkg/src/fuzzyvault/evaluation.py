"""Synthetic fingerprint datasets, capture perturbation and accuracy drivers.

The drivers implement the two standard comparison protocols over a
dataset of F fingers x K captures:

* fvc: genuine score per finger over all unordered capture pairs
  (F * C(K, 2) comparisons) and impostor score over unordered pairs of
  first captures (C(F, 2) comparisons).
* all-vs-all: the same genuine pairs plus every cross-finger capture
  pair.

For each pair the first template is encoded into a fresh vault and the
second is decoded against it, so FNMR counts genuine pairs that fail to
unlock and FMR counts impostor pairs that do.
"""

from __future__ import annotations

import csv
import math
import random
import time
from dataclasses import dataclass, asdict
from pathlib import Path

from .aligner import MatchParams
from .decoder import DEFAULT_STRATEGY, SubsetStrategy, decode_vault
from .minutiae import InsufficientMinutiae, Minutia, Template, read_template
from .vault import ChaffExhausted, VaultParams, encode_vault

DEFAULT_MIN_DISTANCE = 8.0  # generation floor between synthetic minutiae, px


class DatasetTooSmall(ValueError):
    """Raised when a dataset cannot support the requested protocol."""


@dataclass(frozen=True)
class Finger:
    finger_id: str
    captures: tuple[Template, ...]


@dataclass(frozen=True)
class Dataset:
    fingers: tuple[Finger, ...]
    width: int
    height: int

    def capture_counts(self) -> list[int]:
        return [len(f.captures) for f in self.fingers]


@dataclass(frozen=True)
class PerturbationModel:
    """Bounds for the capture-to-capture variation of one finger."""

    max_rotation: float = 15.0  # degrees
    max_translation: float = 10.0  # pixels per axis
    max_jitter: float = 4.0  # per-minutia pixels per axis
    max_theta_jitter: float = 6.0  # per-minutia degrees
    max_drop_fraction: float = 0.2


@dataclass(frozen=True)
class AccuracyReport:
    fmr: float
    fnmr: float
    genuine_comparisons: int
    impostor_comparisons: int
    genuine_failures: int  # pairs skipped because encode/select failed
    impostor_failures: int
    mean_encode_seconds: float
    mean_decode_seconds: float
    mean_total_seconds: float


@dataclass(frozen=True)
class EvalConfig:
    """One named benchmark configuration: vault and matcher parameters."""

    degree: int
    genuine_count: int
    chaff_count: int
    points_distance: float
    x_thres: float
    y_thres: float
    theta_thres: float
    theta_basis_thres: float

    def vault_params(self, width: int = 400, height: int = 560) -> VaultParams:
        return VaultParams(
            degree=self.degree,
            genuine_count=self.genuine_count,
            chaff_count=self.chaff_count,
            points_distance=self.points_distance,
            width=width,
            height=height,
        )

    def match_params(self) -> MatchParams:
        return MatchParams(self.x_thres, self.y_thres, self.theta_thres, self.theta_basis_thres)


# Built-in evaluation configurations, ordered from permissive to strict.
BUILTIN_CONFIGS: dict[str, EvalConfig] = {
    "fvc-1": EvalConfig(8, 30, 340, 10, 12, 12, 12, 15),
    "fvc-2": EvalConfig(8, 34, 300, 10, 12, 12, 12, 10),
    "fvc-3": EvalConfig(8, 40, 300, 10, 15, 15, 15, 10),
    "fvc-4": EvalConfig(10, 30, 300, 10, 12, 12, 12, 10),
    "fvc-5": EvalConfig(12, 40, 300, 10, 15, 15, 15, 10),
    "fvc-6": EvalConfig(14, 30, 300, 10, 15, 15, 15, 10),
}


def synth_template(
    seed: int,
    minutia_count: int,
    width: int = 400,
    height: int = 560,
    min_distance: float = DEFAULT_MIN_DISTANCE,
) -> Template:
    """Deterministic random template: same seed, same template.

    Coordinates are uniform in-bounds with pairwise distance at least
    min_distance, orientations uniform, qualities uniform in [1, 100].
    """
    rng = random.Random(seed)
    placed: list[Minutia] = []
    min_d2 = min_distance * min_distance
    attempts = 10_000 * max(1, minutia_count)
    while len(placed) < minutia_count:
        attempts -= 1
        if attempts < 0:
            raise RuntimeError(
                f"cannot place {minutia_count} minutiae {min_distance}px apart in {width}x{height}"
            )
        x = rng.randrange(width)
        y = rng.randrange(height)
        if any((x - m.x) ** 2 + (y - m.y) ** 2 < min_d2 for m in placed):
            continue
        theta = rng.uniform(0.0, 360.0) % 360.0
        placed.append(Minutia(x, y, theta, rng.randint(1, 100)))
    return Template(tuple(placed), width, height)


def perturb_template(
    template: Template,
    rotation: float = 0.0,
    translation: tuple[float, float] = (0.0, 0.0),
    jitter: float = 0.0,
    theta_jitter: float = 0.0,
    drop_fraction: float = 0.0,
    rng: random.Random | None = None,
) -> Template:
    """Simulate a repeat capture of the same finger.

    One global rigid motion (rotation about the image center, then
    translation) hits every minutia; independent uniform jitter in
    [-jitter, jitter] per axis and [-theta_jitter, theta_jitter] degrees
    models local distortion; minutiae pushed out of bounds are dropped,
    then a random drop_fraction of the survivors disappears.  Qualities
    are kept.  With everything zero the template comes back identical.
    """
    if rng is None:
        rng = random.Random()
    cx, cy = template.width / 2.0, template.height / 2.0
    r = math.radians(rotation)
    cr, sr = math.cos(r), math.sin(r)
    tx, ty = translation
    kept: list[Minutia] = []
    for m in template.minutiae:
        px, py = m.x - cx, m.y - cy
        x = cx + cr * px - sr * py + tx + rng.uniform(-jitter, jitter)
        y = cy + sr * px + cr * py + ty + rng.uniform(-jitter, jitter)
        theta = (m.theta + rotation + rng.uniform(-theta_jitter, theta_jitter)) % 360.0
        xi, yi = round(x), round(y)
        if 0 <= xi < template.width and 0 <= yi < template.height:
            kept.append(Minutia(xi, yi, theta, m.quality))
    drop = int(round(drop_fraction * len(kept)))
    if drop > 0:
        doomed = set(rng.sample(range(len(kept)), min(drop, len(kept))))
        kept = [m for i, m in enumerate(kept) if i not in doomed]
    return Template(tuple(kept), template.width, template.height)


def make_synthetic_dataset(
    num_fingers: int,
    captures_per_finger: int,
    minutia_count: int = 60,
    width: int = 400,
    height: int = 560,
    seed: int = 0,
    perturbation: PerturbationModel = PerturbationModel(),
) -> Dataset:
    """F fingers x K captures; capture 1 is the base, the rest are perturbed."""
    rng = random.Random(seed)
    fingers = []
    for f in range(num_fingers):
        base = synth_template(rng.getrandbits(64), minutia_count, width, height)
        captures = [base]
        for _ in range(captures_per_finger - 1):
            captures.append(
                perturb_template(
                    base,
                    rotation=rng.uniform(-perturbation.max_rotation, perturbation.max_rotation),
                    translation=(
                        rng.uniform(-perturbation.max_translation, perturbation.max_translation),
                        rng.uniform(-perturbation.max_translation, perturbation.max_translation),
                    ),
                    jitter=perturbation.max_jitter,
                    theta_jitter=perturbation.max_theta_jitter,
                    drop_fraction=rng.uniform(0.0, perturbation.max_drop_fraction),
                    rng=rng,
                )
            )
        fingers.append(Finger(f"finger{f:04d}", tuple(captures)))
    return Dataset(tuple(fingers), width, height)


def load_dataset(root, width: int, height: int) -> Dataset:
    """Read a ``finger_id/capture_k.xyt`` directory tree, sorted for determinism."""
    root = Path(root)
    fingers = []
    for finger_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        captures = tuple(
            read_template(path, width, height) for path in sorted(finger_dir.glob("*.xyt"))
        )
        if captures:
            fingers.append(Finger(finger_dir.name, captures))
    if not fingers:
        raise DatasetTooSmall(f"no finger directories with .xyt captures under {root}")
    return Dataset(tuple(fingers), width, height)


Pair = tuple[tuple[int, int], tuple[int, int]]  # ((finger, capture), (finger, capture))


def fvc_pairs(dataset: Dataset) -> tuple[list[Pair], list[Pair]]:
    """Genuine and impostor comparison pairs under the fvc protocol."""
    genuine = [
        ((f, a), (f, b))
        for f, finger in enumerate(dataset.fingers)
        for a in range(len(finger.captures))
        for b in range(a + 1, len(finger.captures))
    ]
    impostor = [
        ((f1, 0), (f2, 0))
        for f1 in range(len(dataset.fingers))
        for f2 in range(f1 + 1, len(dataset.fingers))
    ]
    return genuine, impostor


def all_vs_all_pairs(dataset: Dataset) -> tuple[list[Pair], list[Pair]]:
    """Genuine pairs as in fvc; impostor pairs over every cross-finger pair."""
    genuine, _ = fvc_pairs(dataset)
    impostor = [
        ((f1, c1), (f2, c2))
        for f1 in range(len(dataset.fingers))
        for f2 in range(f1 + 1, len(dataset.fingers))
        for c1 in range(len(dataset.fingers[f1].captures))
        for c2 in range(len(dataset.fingers[f2].captures))
    ]
    return genuine, impostor


def _require_protocol_shape(dataset: Dataset):
    if len(dataset.fingers) < 2:
        raise DatasetTooSmall("need at least 2 fingers")
    if min(dataset.capture_counts()) < 2:
        raise DatasetTooSmall("need at least 2 captures per finger")


def _run_pairs(
    dataset: Dataset,
    pairs: tuple[list[Pair], list[Pair]],
    vault_params: VaultParams,
    match_params: MatchParams,
    strategy: SubsetStrategy,
    rng: random.Random,
    dry_run: bool,
) -> AccuracyReport:
    genuine_pairs, impostor_pairs = pairs
    if dry_run:
        return AccuracyReport(
            fmr=0.0,
            fnmr=0.0,
            genuine_comparisons=len(genuine_pairs),
            impostor_comparisons=len(impostor_pairs),
            genuine_failures=0,
            impostor_failures=0,
            mean_encode_seconds=0.0,
            mean_decode_seconds=0.0,
            mean_total_seconds=0.0,
        )

    encode_times: list[float] = []
    decode_times: list[float] = []

    def compare(pair: Pair) -> bool | None:
        (f1, c1), (f2, c2) = pair
        reference = dataset.fingers[f1].captures[c1]
        probe = dataset.fingers[f2].captures[c2]
        try:
            t0 = time.perf_counter()
            vault, _ = encode_vault(reference, vault_params, rng)
            t1 = time.perf_counter()
            result = decode_vault(vault, probe, match_params, strategy, rng)
            t2 = time.perf_counter()
        except (InsufficientMinutiae, ChaffExhausted):
            return None
        encode_times.append(t1 - t0)
        decode_times.append(t2 - t1)
        return result.matched

    genuine_fail = 0
    false_rejects = 0
    for pair in genuine_pairs:
        matched = compare(pair)
        if matched is None:
            genuine_fail += 1
        elif not matched:
            false_rejects += 1

    impostor_fail = 0
    false_accepts = 0
    for pair in impostor_pairs:
        matched = compare(pair)
        if matched is None:
            impostor_fail += 1
        elif matched:
            false_accepts += 1

    genuine_done = len(genuine_pairs) - genuine_fail
    impostor_done = len(impostor_pairs) - impostor_fail
    total = [e + d for e, d in zip(encode_times, decode_times)]
    return AccuracyReport(
        fmr=false_accepts / impostor_done if impostor_done else 0.0,
        fnmr=false_rejects / genuine_done if genuine_done else 0.0,
        genuine_comparisons=len(genuine_pairs),
        impostor_comparisons=len(impostor_pairs),
        genuine_failures=genuine_fail,
        impostor_failures=impostor_fail,
        mean_encode_seconds=sum(encode_times) / len(encode_times) if encode_times else 0.0,
        mean_decode_seconds=sum(decode_times) / len(decode_times) if decode_times else 0.0,
        mean_total_seconds=sum(total) / len(total) if total else 0.0,
    )


def run_fvc_protocol(
    dataset: Dataset,
    vault_params: VaultParams,
    match_params: MatchParams,
    strategy: SubsetStrategy = DEFAULT_STRATEGY,
    rng: random.Random | None = None,
    dry_run: bool = False,
) -> AccuracyReport:
    """FMR/FNMR under the fvc protocol; dry_run only counts the pairs."""
    _require_protocol_shape(dataset)
    if rng is None:
        rng = random.Random()
    return _run_pairs(dataset, fvc_pairs(dataset), vault_params, match_params, strategy, rng, dry_run)


def run_all_vs_all(
    dataset: Dataset,
    vault_params: VaultParams,
    match_params: MatchParams,
    strategy: SubsetStrategy = DEFAULT_STRATEGY,
    rng: random.Random | None = None,
    dry_run: bool = False,
) -> AccuracyReport:
    """FMR/FNMR with impostor comparisons over every cross-finger pair."""
    _require_protocol_shape(dataset)
    if rng is None:
        rng = random.Random()
    return _run_pairs(
        dataset, all_vs_all_pairs(dataset), vault_params, match_params, strategy, rng, dry_run
    )


def report_to_dict(report: AccuracyReport) -> dict:
    return asdict(report)


def write_report_csv(report: AccuracyReport, path):
    """One header row, one value row; loads cleanly into a spreadsheet."""
    data = report_to_dict(report)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(data))
        writer.writeheader()
        writer.writerow(data)
