"""Vault documents and the stores that hold them.

A stored vault is deliberately skeletal: an object id, the owning user
id, the polynomial degree and the (X, Y) point list.  Nothing else is
accepted, because anything else risks leaking template or secret
material onto a host we treat as untrusted.  validate_document_dict is
the single gate both the wire format and the at-rest format must pass.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from .vault import Vault, VaultParams, VaultPoint

_USER_ID_RE = re.compile(r"^[A-Za-z0-9._-]{1,64}$")
_WORD_LIMIT = 1 << 32


class DocumentInvalid(ValueError):
    """A vault document violates the storage schema."""


class StorageUnavailable(RuntimeError):
    """The vault store cannot be reached or cannot complete an operation."""


@dataclass(frozen=True)
class VaultDocument:
    object_id: str | None
    user_id: str
    degree: int
    points: tuple[VaultPoint, ...]


def document_from_vault(vault: Vault, user_id: str, object_id: str | None = None) -> VaultDocument:
    return VaultDocument(object_id, user_id, vault.params.degree, vault.points)


def vault_from_document(doc: VaultDocument, params: VaultParams) -> Vault:
    """Rebuild a decodable Vault under the deployment's enrollment parameters.

    The document deliberately stores no parameters beyond the degree, so
    the verifier must know the enrollment configuration out of band.
    """
    if doc.degree != params.degree:
        raise DocumentInvalid(f"document degree {doc.degree} != configured {params.degree}")
    if len(doc.points) != params.vault_size:
        raise DocumentInvalid(
            f"document has {len(doc.points)} points, configuration expects {params.vault_size}"
        )
    return Vault(params, doc.points)


def document_to_dict(doc: VaultDocument) -> dict:
    out = {
        "user_id": doc.user_id,
        "n": doc.degree,
        "points": [[p.X, p.Y] for p in doc.points],
    }
    if doc.object_id is not None:
        out = {"id": doc.object_id, **out}
    return out


def validate_document_dict(data, require_id: bool) -> None:
    """Reject anything that is not exactly a vault document.

    Raises DocumentInvalid with a reason; returning means the dict has
    exactly the allowed keys and every field is well formed.
    """
    if not isinstance(data, dict):
        raise DocumentInvalid("document must be a JSON object")
    expected = {"id", "user_id", "n", "points"} if require_id else {"user_id", "n", "points"}
    got = set(data)
    if got != expected:
        extra, missing = got - expected, expected - got
        parts = []
        if missing:
            parts.append(f"missing {sorted(missing)}")
        if extra:
            parts.append(f"unexpected {sorted(extra)}")
        raise DocumentInvalid("bad document keys: " + ", ".join(parts))
    if require_id:
        oid = data["id"]
        if not isinstance(oid, str) or not oid:
            raise DocumentInvalid("id must be a non-empty string")
    user_id = data["user_id"]
    if not isinstance(user_id, str) or not _USER_ID_RE.match(user_id):
        raise DocumentInvalid("user_id must match [A-Za-z0-9._-]{1,64}")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DocumentInvalid("n must be an integer >= 1")
    points = data["points"]
    if not isinstance(points, list):
        raise DocumentInvalid("points must be a list")
    if len(points) < n + 1:
        raise DocumentInvalid(f"need at least {n + 1} points for degree {n}")
    for i, entry in enumerate(points):
        if not isinstance(entry, list) or len(entry) != 2:
            raise DocumentInvalid(f"points[{i}] must be a [X, Y] pair")
        for coord in entry:
            if not isinstance(coord, int) or isinstance(coord, bool):
                raise DocumentInvalid(f"points[{i}] coordinates must be integers")
            if not 0 <= coord < _WORD_LIMIT:
                raise DocumentInvalid(f"points[{i}] coordinates must fit in 32 bits")


def document_from_dict(data, require_id: bool = True) -> VaultDocument:
    validate_document_dict(data, require_id)
    return VaultDocument(
        object_id=data.get("id"),
        user_id=data["user_id"],
        degree=data["n"],
        points=tuple(VaultPoint(x, y) for x, y in data["points"]),
    )


class MemoryVaultStore:
    """In-process store, mainly for tests and the demo server's --memory mode."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_user: dict[str, list[VaultDocument]] = {}

    def put(self, doc: VaultDocument) -> str:
        validate_document_dict(document_to_dict(doc), require_id=doc.object_id is not None)
        object_id = doc.object_id or uuid.uuid4().hex
        stored = VaultDocument(object_id, doc.user_id, doc.degree, doc.points)
        with self._lock:
            self._by_user.setdefault(doc.user_id, []).append(stored)
        return object_id

    def fetch(self, user_id: str) -> list[VaultDocument]:
        if not _USER_ID_RE.match(user_id or ""):
            raise DocumentInvalid("user_id must match [A-Za-z0-9._-]{1,64}")
        with self._lock:
            return list(self._by_user.get(user_id, []))


class FileVaultStore:
    """One JSON file per vault under root/<user_id>/<object_id>.json.

    Writes go through a temp file plus fsync plus os.replace, so a
    crash can leave stale temp files but never a half-written document.
    """

    def __init__(self, root):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageUnavailable(f"cannot create store root {self.root}: {exc}") from exc
        self._locks_guard = threading.Lock()
        self._user_locks: dict[str, threading.Lock] = {}

    def _user_lock(self, user_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._user_locks.setdefault(user_id, threading.Lock())

    def put(self, doc: VaultDocument) -> str:
        validate_document_dict(document_to_dict(doc), require_id=doc.object_id is not None)
        object_id = doc.object_id or uuid.uuid4().hex
        stored = VaultDocument(object_id, doc.user_id, doc.degree, doc.points)
        payload = json.dumps(document_to_dict(stored), indent=2).encode()
        user_dir = self.root / doc.user_id
        final = user_dir / f"{object_id}.json"
        tmp = user_dir / f".{object_id}.tmp"
        with self._user_lock(doc.user_id):
            try:
                user_dir.mkdir(exist_ok=True)
                with open(tmp, "wb") as fh:
                    fh.write(payload)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, final)
            except OSError as exc:
                raise StorageUnavailable(f"cannot persist vault: {exc}") from exc
        return object_id

    def fetch(self, user_id: str) -> list[VaultDocument]:
        if not _USER_ID_RE.match(user_id or ""):
            raise DocumentInvalid("user_id must match [A-Za-z0-9._-]{1,64}")
        user_dir = self.root / user_id
        if not user_dir.is_dir():
            return []
        docs = []
        with self._user_lock(user_id):
            try:
                paths = sorted(p for p in user_dir.glob("*.json") if not p.name.startswith("."))
                for path in paths:
                    with open(path, "rb") as fh:
                        data = json.loads(fh.read())
                    docs.append(document_from_dict(data, require_id=True))
            except OSError as exc:
                raise StorageUnavailable(f"cannot read vaults: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise DocumentInvalid(f"corrupt vault file: {exc}") from exc
        return docs
