"""Fingerprint fuzzy vaults over GF(2^32).

Encode a minutiae template and a random secret into a vault of genuine
and chaff points; a sufficiently similar capture of the same finger
aligns, picks the genuine points back out and recovers the secret via
polynomial interpolation plus a CRC check.  Includes the attack-cost
analysis, an accuracy harness and a small enroll/verify service.
"""

from .aligner import MatchParams, build_geometric_table, rigid_transform
from .decoder import (
    DEFAULT_STRATEGY,
    ITERATIVE_SELECTION,
    RANDOM_GENERATION,
    RANDOM_SELECTION,
    MatchResult,
    SubsetStrategy,
    decode_vault,
    try_unlock,
)
from .evaluation import (
    BUILTIN_CONFIGS,
    AccuracyReport,
    Dataset,
    EvalConfig,
    Finger,
    make_synthetic_dataset,
    perturb_template,
    run_all_vs_all,
    run_fvc_protocol,
    synth_template,
)
from .minutiae import (
    InsufficientMinutiae,
    Minutia,
    OutOfBounds,
    ParseError,
    Template,
    parse_template,
    read_template,
    select_minutiae,
)
from .security import (
    AttackEstimate,
    SecurityModel,
    bit_security,
    estimate,
    expected_attempts,
    monotonicity_report,
    simulate_attack,
)
from .vault import (
    ChaffExhausted,
    Vault,
    VaultParams,
    VaultPoint,
    encode_vault,
    vault_from_dict,
    vault_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "AttackEstimate",
    "BUILTIN_CONFIGS",
    "ChaffExhausted",
    "Dataset",
    "DEFAULT_STRATEGY",
    "EvalConfig",
    "Finger",
    "InsufficientMinutiae",
    "ITERATIVE_SELECTION",
    "MatchParams",
    "MatchResult",
    "Minutia",
    "OutOfBounds",
    "ParseError",
    "RANDOM_GENERATION",
    "RANDOM_SELECTION",
    "SecurityModel",
    "SubsetStrategy",
    "Template",
    "Vault",
    "VaultParams",
    "VaultPoint",
    "bit_security",
    "build_geometric_table",
    "decode_vault",
    "encode_vault",
    "estimate",
    "expected_attempts",
    "make_synthetic_dataset",
    "monotonicity_report",
    "parse_template",
    "perturb_template",
    "read_template",
    "rigid_transform",
    "run_all_vs_all",
    "run_fvc_protocol",
    "select_minutiae",
    "simulate_attack",
    "synth_template",
    "try_unlock",
    "vault_from_dict",
    "vault_to_dict",
    "__version__",
]
