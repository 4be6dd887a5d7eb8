"""Subset strategies, CRC unlocking and whole-vault decoding."""

import itertools
import random

import pytest

from fuzzyvault.aligner import MatchParams
from fuzzyvault.decoder import (
    ArityError,
    CapacityError,
    DEFAULT_STRATEGY,
    ITERATIVE_SELECTION,
    RANDOM_GENERATION,
    RANDOM_SELECTION,
    SubsetStrategy,
    decode_vault,
    generate_subsets,
    try_unlock,
)
from fuzzyvault.evaluation import BUILTIN_CONFIGS, perturb_template, synth_template
from fuzzyvault.vault import VaultPoint, encode_vault, genuine_indices

CONFIG1 = BUILTIN_CONFIGS["fvc-1"]
ITERATIVE = SubsetStrategy(ITERATIVE_SELECTION)


def small_vault(seed=30, n=2, g=3, c=8):
    rng = random.Random(seed)
    t = synth_template(seed, 40)
    cfg_params = CONFIG1.vault_params()
    from fuzzyvault.vault import VaultParams

    p = VaultParams(n, g, c, 10.0, cfg_params.width, cfg_params.height)
    vault, secret = encode_vault(t, p, rng)
    return vault, secret, t


def test_iterative_subsets_lexicographic():
    pts = [VaultPoint(i, 0) for i in range(4)]
    got = list(generate_subsets(pts, 3, ITERATIVE))
    assert got == list(itertools.combinations(pts, 3))


def test_random_generation_covers_all_subsets():
    pts = [VaultPoint(i, 0) for i in range(4)]
    got = list(generate_subsets(pts, 3, SubsetStrategy(RANDOM_GENERATION), random.Random(1)))
    key = lambda subset: tuple(p.X for p in subset)
    assert sorted(got, key=key) == sorted(itertools.combinations(pts, 3), key=key)


def test_random_generation_capacity_error():
    pts = [VaultPoint(i, 0) for i in range(40)]
    tight = SubsetStrategy(RANDOM_GENERATION, subset_budget=10_000)
    with pytest.raises(CapacityError):
        generate_subsets(pts, 13, tight, random.Random(2))  # C(40,13) is ~12e9


def test_random_selection_draw_count_and_cap():
    pts = [VaultPoint(i, 0) for i in range(6)]
    # uncapped: exactly C(6,3) = 20 draws, repeats allowed
    drawn = list(generate_subsets(pts, 3, SubsetStrategy(RANDOM_SELECTION), random.Random(3)))
    assert len(drawn) == 20
    for s in drawn:
        assert len(set(s)) == 3
    capped = SubsetStrategy(RANDOM_SELECTION, iteration_cap=5)
    assert len(list(generate_subsets(pts, 3, capped, random.Random(4)))) == 5


def test_random_variants_require_rng():
    pts = [VaultPoint(i, 0) for i in range(4)]
    with pytest.raises(ValueError):
        generate_subsets(pts, 2, SubsetStrategy(RANDOM_SELECTION))


def test_generate_subsets_arity_error():
    pts = [VaultPoint(i, 0) for i in range(3)]
    with pytest.raises(ArityError):
        generate_subsets(pts, 4, ITERATIVE)


def test_strategy_validation():
    with pytest.raises(ValueError):
        SubsetStrategy("clever-guessing")
    with pytest.raises(ValueError):
        SubsetStrategy(RANDOM_SELECTION, iteration_cap=0)


def test_try_unlock_recovers_secret_from_any_genuine_subset():
    vault, secret, _ = small_vault()
    genuine = [vault.points[i] for i in genuine_indices(vault, secret)]
    for subset in itertools.combinations(genuine, 3):
        assert try_unlock(subset, 2) == secret


def test_try_unlock_rejects_chaff_substitution():
    vault, secret, _ = small_vault(seed=31, n=2, g=3, c=30)
    gset = set(genuine_indices(vault, secret))
    genuine = [vault.points[i] for i in gset]
    chaff = [pt for i, pt in enumerate(vault.points) if i not in gset]
    rng = random.Random(5)
    for _ in range(300):
        subset = genuine[:2] + [rng.choice(chaff)]
        assert try_unlock(subset, 2) is None


def test_try_unlock_filters_duplicate_abscissas():
    vault, secret, _ = small_vault()
    genuine = [vault.points[i] for i in genuine_indices(vault, secret)]
    assert try_unlock([genuine[0], genuine[0], genuine[1]], 2) is None


def test_decode_self_match():
    rng = random.Random(32)
    t = synth_template(320, 60)
    vault, secret = encode_vault(t, CONFIG1.vault_params(), rng)
    res = decode_vault(vault, t, CONFIG1.match_params(), ITERATIVE, rng)
    assert res.matched and res.secret == secret
    assert res.bases_tried >= 1
    assert res.candidate_sets_evaluated >= 1
    assert res.interpolations_performed >= 1
    assert res.elapsed_seconds > 0


def test_decode_perturbed_probe_within_thresholds():
    rng = random.Random(33)
    t = synth_template(330, 60)
    vault, secret = encode_vault(t, CONFIG1.vault_params(), rng)
    probe = perturb_template(t, rotation=10.0, translation=(5.0, 5.0),
                             jitter=4.0, theta_jitter=0.0, rng=rng)
    res = decode_vault(vault, probe, CONFIG1.match_params(), ITERATIVE, rng)
    assert res.matched and res.secret == secret


def test_decode_impostor_rejected():
    cfg = BUILTIN_CONFIGS["fvc-4"]  # n=10
    rng = random.Random(34)
    vault, _ = encode_vault(synth_template(340, 60), cfg.vault_params(), rng)
    impostor = synth_template(341, 60)
    res = decode_vault(vault, impostor, cfg.match_params(), DEFAULT_STRATEGY, rng)
    assert not res.matched and res.secret is None


def test_decode_matched_iff_secret_present():
    rng = random.Random(35)
    t = synth_template(350, 60)
    vault, _ = encode_vault(t, CONFIG1.vault_params(), rng)
    for probe in (t, synth_template(351, 60)):
        res = decode_vault(vault, probe, CONFIG1.match_params(), ITERATIVE, rng)
        assert res.matched == (res.secret is not None)


def test_decode_agrees_across_strategies():
    # small arity so random-generation can materialize every subset
    vault, secret, t = small_vault(seed=36, n=2, g=3, c=8)
    rng = random.Random(36)
    probe = perturb_template(t, rotation=4.0, translation=(3.0, -2.0),
                             jitter=2.0, theta_jitter=2.0, rng=rng)
    for strategy in (
        ITERATIVE,
        SubsetStrategy(RANDOM_GENERATION),
        SubsetStrategy(RANDOM_SELECTION, iteration_cap=2**20),
    ):
        res = decode_vault(vault, probe, CONFIG1.match_params(), strategy, random.Random(37))
        assert res.matched and res.secret == secret


def test_decode_insufficient_probe_minutiae():
    from fuzzyvault.minutiae import InsufficientMinutiae

    rng = random.Random(38)
    vault, _ = encode_vault(synth_template(380, 60), CONFIG1.vault_params(), rng)
    sparse = synth_template(381, 10)
    with pytest.raises(InsufficientMinutiae):
        decode_vault(vault, sparse, CONFIG1.match_params(), ITERATIVE, rng)


def test_decode_respects_iteration_cap():
    # a cap of 1 means at most one interpolation per candidate set
    rng = random.Random(39)
    t = synth_template(390, 60)
    vault, _ = encode_vault(t, CONFIG1.vault_params(), rng)
    strategy = SubsetStrategy(RANDOM_SELECTION, iteration_cap=1)
    res = decode_vault(vault, t, CONFIG1.match_params(), strategy, rng)
    assert res.interpolations_performed <= res.candidate_sets_evaluated
