"""The fv command line.

Subcommands cover the whole system: local vault files (encode, verify),
attack-cost reports (security, benchmark), accuracy runs (eval) and the
distributed deployment (serve, enroll, auth).

Exit codes follow the verification convention everywhere: 0 for a
positive decision, 1 for a negative one, 2 for any error, and 3 when an
auth id has nothing enrolled.
"""

from __future__ import annotations

import json
import random
import statistics
import sys
import time
from pathlib import Path

import click

from .aligner import MatchParams
from .client import UnknownUser
from .client import enroll as client_enroll
from .client import verify as client_verify
from .decoder import (
    DEFAULT_ITERATION_CAP,
    ITERATIVE_SELECTION,
    RANDOM_GENERATION,
    RANDOM_SELECTION,
    SubsetStrategy,
    decode_vault,
    try_unlock,
)
from .evaluation import (
    BUILTIN_CONFIGS,
    DatasetTooSmall,
    load_dataset,
    make_synthetic_dataset,
    report_to_dict,
    run_all_vs_all,
    run_fvc_protocol,
    write_report_csv,
)
from .minutiae import InsufficientMinutiae, OutOfBounds, ParseError, read_template
from .security import DegreeTooHigh, SecurityModel, estimate
from .service import VaultStoreService
from .store import DocumentInvalid, FileVaultStore, MemoryVaultStore, StorageUnavailable
from .vault import (
    ChaffExhausted,
    VaultParams,
    VaultPoint,
    encode_vault,
    vault_from_dict,
    vault_to_dict,
)

_STRATEGIES = [ITERATIVE_SELECTION, RANDOM_GENERATION, RANDOM_SELECTION]
_USAGE_ERRORS = (
    ParseError,
    OutOfBounds,
    InsufficientMinutiae,
    ChaffExhausted,
    DocumentInvalid,
    StorageUnavailable,
    DatasetTooSmall,
    DegreeTooHigh,
    ValueError,
    OSError,
)


def _fail(exc) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


def _make_strategy(name: str, cap: int | None) -> SubsetStrategy:
    if name == RANDOM_SELECTION:
        return SubsetStrategy(name, iteration_cap=DEFAULT_ITERATION_CAP if cap is None else cap)
    return SubsetStrategy(name, iteration_cap=cap)


@click.group()
def main():
    """Fingerprint fuzzy vaults: encode, match, analyze, serve."""


@main.command()
@click.option("--template", "template_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="minutiae file (.xyt)")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="where to write the vault JSON")
@click.option("--n", "degree", default=8, show_default=True, help="polynomial degree")
@click.option("--genuine", default=30, show_default=True, help="genuine minutiae locked in")
@click.option("--chaff", default=340, show_default=True, help="chaff points added")
@click.option("--pd", default=10.0, show_default=True, help="minimum point distance, px")
@click.option("--width", default=400, show_default=True)
@click.option("--height", default=560, show_default=True)
@click.option("--seed", type=int, default=None, help="RNG seed (default: OS entropy)")
@click.option("--secret-out", type=click.Path(dir_okay=False), default=None,
              help="write the bound secret (hex) to a file instead of stdout")
def encode(template_path, out_path, degree, genuine, chaff, pd, width, height, seed, secret_out):
    """Lock a minutiae template into a vault file."""
    rng = random.Random(seed)
    try:
        params = VaultParams(degree, genuine, chaff, pd, width, height)
        template = read_template(template_path, width, height)
        vault, secret = encode_vault(template, params, rng)
        Path(out_path).write_text(json.dumps(vault_to_dict(vault), indent=2) + "\n")
    except _USAGE_ERRORS as exc:
        _fail(exc)
    if secret_out:
        Path(secret_out).write_text(secret.hex() + "\n")
    else:
        click.echo(secret.hex())


@main.command()
@click.option("--vault", "vault_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--probe", "probe_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--x-thres", default=12.0, show_default=True)
@click.option("--y-thres", default=12.0, show_default=True)
@click.option("--theta-thres", default=12.0, show_default=True)
@click.option("--basis-thres", default=15.0, show_default=True)
@click.option("--strategy", "strategy_name", type=click.Choice(_STRATEGIES),
              default=RANDOM_SELECTION, show_default=True)
@click.option("--cap", type=int, default=None, help="subset draws per candidate set")
@click.option("--seed", type=int, default=None)
@click.option("--stats", is_flag=True, help="print the match counters as JSON")
def verify(vault_path, probe_path, x_thres, y_thres, theta_thres, basis_thres,
           strategy_name, cap, seed, stats):
    """Try to unlock a vault file with a probe template.

    Exit 0 on match, 1 on non-match, 2 on error.
    """
    rng = random.Random(seed)
    try:
        vault = vault_from_dict(json.loads(Path(vault_path).read_text()))
        probe = read_template(probe_path, vault.params.width, vault.params.height)
        match_params = MatchParams(x_thres, y_thres, theta_thres, basis_thres)
        result = decode_vault(vault, probe, match_params, _make_strategy(strategy_name, cap), rng)
    except _USAGE_ERRORS as exc:
        _fail(exc)
    if stats:
        click.echo(json.dumps({
            "matched": result.matched,
            "bases_tried": result.bases_tried,
            "candidate_sets_evaluated": result.candidate_sets_evaluated,
            "interpolations_performed": result.interpolations_performed,
            "elapsed_seconds": result.elapsed_seconds,
            "secret": result.secret.hex() if result.secret else None,
        }))
    sys.exit(0 if result.matched else 1)


@main.command()
@click.option("--g", "genuine", required=True, type=int, help="genuine points in the vault")
@click.option("--c", "chaff", required=True, type=int, help="chaff points in the vault")
@click.option("--n", "degree", required=True, type=int, help="polynomial degree")
@click.option("--l", "interp_seconds", type=float, default=None,
              help="measured seconds per unlock attempt (see: fv benchmark)")
def security(genuine, chaff, degree, interp_seconds):
    """Analytic brute-force cost of a vault shape, as JSON."""
    try:
        est = estimate(SecurityModel(genuine, chaff, degree, interp_seconds))
    except _USAGE_ERRORS as exc:
        _fail(exc)
    try:
        attempts = float(est.expected_attempts)
    except OverflowError:
        attempts = int(est.expected_attempts)  # too big for a float; JSON takes the integer
    click.echo(json.dumps({
        "v_s": est.vault_subsets,
        "g_s": est.genuine_subsets,
        "expected_attempts": attempts,
        "expected_seconds": est.expected_seconds,
        "bit_security": est.bit_security,
    }))


@main.command()
@click.option("--n", "degree", default=8, show_default=True, help="polynomial degree")
@click.option("--trials", default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def benchmark(degree, trials, seed):
    """Measure seconds per unlock attempt; feed the result to security --l."""
    rng = random.Random(seed)
    samples = []
    for _ in range(trials):
        xs = rng.sample(range(1 << 32), degree + 1)
        subset = [VaultPoint(x, rng.getrandbits(32)) for x in xs]
        t0 = time.perf_counter()
        try_unlock(subset, degree)
        samples.append(time.perf_counter() - t0)
    click.echo(json.dumps({
        "degree": degree,
        "trials": trials,
        "interpolation_seconds": statistics.fmean(samples),
    }))


def _parse_synthetic(shape: str) -> tuple[int, int]:
    pairs = {}
    for field in shape.split(","):
        key, _, value = field.partition("=")
        pairs[key.strip()] = value.strip()
    try:
        return int(pairs["fingers"]), int(pairs["captures"])
    except (KeyError, ValueError):
        raise ValueError(f'--synthetic wants "fingers=10,captures=5", got {shape!r}') from None


@main.command(name="eval")
@click.option("--dataset", "dataset_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="directory of finger_id/capture.xyt trees")
@click.option("--synthetic", "synthetic_spec", default=None, metavar="SHAPE",
              help='generate data instead, e.g. "fingers=10,captures=5"')
@click.option("--protocol", type=click.Choice(["fvc", "all"]), default="fvc", show_default=True)
@click.option("--config", "config_name", type=click.Choice(sorted(BUILTIN_CONFIGS)),
              default="fvc-1", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="also write the report as CSV")
@click.option("--width", default=400, show_default=True)
@click.option("--height", default=560, show_default=True)
@click.option("--minutiae", default=60, show_default=True, help="synthetic minutiae per finger")
@click.option("--dry-run", is_flag=True, help="count the comparisons, execute none")
def eval_cmd(dataset_dir, synthetic_spec, protocol, config_name, seed, out_path,
             width, height, minutiae, dry_run):
    """Accuracy run (FMR/FNMR) over a dataset directory or synthetic data."""
    if (dataset_dir is None) == (synthetic_spec is None):
        _fail("pass exactly one of --dataset and --synthetic")
    cfg = BUILTIN_CONFIGS[config_name]
    try:
        if dataset_dir is not None:
            dataset = load_dataset(dataset_dir, width, height)
        else:
            fingers, captures = _parse_synthetic(synthetic_spec)
            dataset = make_synthetic_dataset(
                fingers, captures, minutia_count=minutiae, width=width, height=height, seed=seed
            )
        runner = run_fvc_protocol if protocol == "fvc" else run_all_vs_all
        report = runner(
            dataset,
            cfg.vault_params(width, height),
            cfg.match_params(),
            rng=random.Random(seed),
            dry_run=dry_run,
        )
        if out_path:
            write_report_csv(report, out_path)
    except _USAGE_ERRORS as exc:
        _fail(exc)
    click.echo(json.dumps(report_to_dict(report), indent=2))


@main.command()
@click.option("--id", "user_id", required=True, help="user id the vault is filed under")
@click.option("--template", "template_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--server", envvar="FV_SERVER", required=True,
              help="vault store URL (env: FV_SERVER)")
@click.option("--config", "config_name", type=click.Choice(sorted(BUILTIN_CONFIGS)),
              default="fvc-1", show_default=True)
@click.option("--width", default=400, show_default=True)
@click.option("--height", default=560, show_default=True)
@click.option("--seed", type=int, default=None)
def enroll(user_id, template_path, server, config_name, width, height, seed):
    """Encode a template locally, store the vault, destroy the template."""
    cfg = BUILTIN_CONFIGS[config_name]
    try:
        object_id, _secret = client_enroll(
            template_path, user_id, server, cfg.vault_params(width, height), random.Random(seed)
        )
    except InsufficientMinutiae as exc:
        _fail(f"{exc} (rescan the finger and retry)")
    except _USAGE_ERRORS as exc:
        _fail(exc)
    click.echo(object_id)


@main.command()
@click.option("--id", "user_id", required=True)
@click.option("--probe", "probe_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--server", envvar="FV_SERVER", required=True,
              help="vault store URL (env: FV_SERVER)")
@click.option("--config", "config_name", type=click.Choice(sorted(BUILTIN_CONFIGS)),
              default="fvc-1", show_default=True)
@click.option("--strategy", "strategy_name", type=click.Choice(_STRATEGIES),
              default=RANDOM_SELECTION, show_default=True)
@click.option("--cap", type=int, default=None)
@click.option("--width", default=400, show_default=True)
@click.option("--height", default=560, show_default=True)
@click.option("--seed", type=int, default=None)
def auth(user_id, probe_path, server, config_name, strategy_name, cap, width, height, seed):
    """Verify a probe against every vault stored under --id.

    Exit 0 accept, 1 reject, 3 unknown user, 2 error.  The probe file is
    deleted once a decision is reached.
    """
    cfg = BUILTIN_CONFIGS[config_name]
    try:
        accepted = client_verify(
            probe_path,
            user_id,
            server,
            cfg.vault_params(width, height),
            cfg.match_params(),
            _make_strategy(strategy_name, cap),
            random.Random(seed),
        )
    except UnknownUser as exc:
        click.echo(f"unknown user: {exc}", err=True)
        sys.exit(3)
    except _USAGE_ERRORS as exc:
        _fail(exc)
    click.echo("accept" if accepted else "reject")
    sys.exit(0 if accepted else 1)


@main.command()
@click.option("--store-root", envvar="FV_STORE_ROOT", type=click.Path(file_okay=False),
              default=None, help="directory for vault files (env: FV_STORE_ROOT)")
@click.option("--memory", "use_memory", is_flag=True, help="volatile in-process store")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8088, show_default=True)
def serve(store_root, use_memory, host, port):
    """Run the vault store service in the foreground."""
    if use_memory == (store_root is not None):
        _fail("pass exactly one of --store-root and --memory")
    try:
        store = MemoryVaultStore() if use_memory else FileVaultStore(store_root)
        service = VaultStoreService(store, host, port)
    except _USAGE_ERRORS as exc:
        _fail(exc)
    click.echo(f"vault store listening on {service.url}", err=True)
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
