"""Enrollment and verification against a remote vault store.

All template processing happens here, on the client.  The server only
ever sees vault documents, and local template files are destroyed the
moment they are no longer needed: after the store acknowledges an
enrollment, and after a verification reaches a decision.  A transport
or storage failure is not a decision, so the file survives it and the
operation can be retried.
"""

from __future__ import annotations

import random
from pathlib import Path

import requests

from .aligner import MatchParams
from .decoder import DEFAULT_STRATEGY, SubsetStrategy, decode_vault
from .minutiae import read_template
from .store import (
    DocumentInvalid,
    StorageUnavailable,
    VaultDocument,
    document_from_dict,
    document_from_vault,
    document_to_dict,
    vault_from_document,
)
from .vault import VaultParams, encode_vault

_TIMEOUT = 10.0  # seconds per HTTP request


class UnknownUser(Exception):
    """No vaults are enrolled under the given user id."""


def _get_vaults(server_url: str, user_id: str) -> list[VaultDocument]:
    try:
        resp = requests.get(
            f"{server_url.rstrip('/')}/vaults", params={"user_id": user_id}, timeout=_TIMEOUT
        )
    except requests.RequestException as exc:
        raise StorageUnavailable(f"cannot reach vault store: {exc}") from exc
    if resp.status_code == 400:
        raise DocumentInvalid(resp.json().get("error", "request rejected"))
    if resp.status_code != 200:
        raise StorageUnavailable(f"vault store returned status {resp.status_code}")
    docs = resp.json().get("vaults", [])
    # validate everything that came over the wire before trusting it
    return [document_from_dict(d, require_id=True) for d in docs]


def enroll(
    template_path,
    user_id: str,
    server_url: str,
    params: VaultParams,
    rng: random.Random | None = None,
) -> tuple[str, bytes]:
    """Encode the template, upload the vault, then destroy the template file.

    Returns (object_id, secret).  The secret never leaves this process;
    callers that only authenticate can drop it.  The template file is
    deleted only after the store acknowledges, so a failed enrollment is
    retriable.
    """
    if rng is None:
        rng = random.Random()
    template_path = Path(template_path)
    template = read_template(template_path, params.width, params.height)
    vault, secret = encode_vault(template, params, rng)
    payload = document_to_dict(document_from_vault(vault, user_id))
    try:
        resp = requests.post(f"{server_url.rstrip('/')}/vaults", json=payload, timeout=_TIMEOUT)
    except requests.RequestException as exc:
        raise StorageUnavailable(f"cannot reach vault store: {exc}") from exc
    if resp.status_code == 400:
        raise DocumentInvalid(resp.json().get("error", "document rejected"))
    if resp.status_code != 201:
        raise StorageUnavailable(f"enrollment not acknowledged (status {resp.status_code})")
    object_id = resp.json()["object_id"]
    template_path.unlink()
    return object_id, secret


def verify(
    probe_path,
    user_id: str,
    server_url: str,
    params: VaultParams,
    match_params: MatchParams,
    strategy: SubsetStrategy = DEFAULT_STRATEGY,
    rng: random.Random | None = None,
) -> bool:
    """True if any vault enrolled under user_id unlocks with this probe.

    The probe file is deleted once a decision is reached, accept or
    reject.  If the store cannot be reached there is no decision and the
    probe is kept.  Raises UnknownUser when the id has no vaults.
    """
    if rng is None:
        rng = random.Random()
    probe_path = Path(probe_path)
    probe = read_template(probe_path, params.width, params.height)
    docs = _get_vaults(server_url, user_id)  # probe survives a store outage
    try:
        if not docs:
            raise UnknownUser(f"no vaults enrolled for user id {user_id!r}")
        for doc in docs:
            vault = vault_from_document(doc, params)
            if decode_vault(vault, probe, match_params, strategy, rng).matched:
                return True
        return False
    finally:
        probe_path.unlink(missing_ok=True)
