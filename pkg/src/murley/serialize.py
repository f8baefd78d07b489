"""Versioned JSON persistence for families, schemes, rings and reports.

Every file is an envelope {"schema", "kind", "config", "config_hash",
"timestamp", "payload"}.  The timestamp is the only field left out of
`payload_hash`, so identical configs give byte-identical payloads.
"""
from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from murley.groupforge import FreeScheme, GroupScheme, ProchazkaGroup, build_prochazka_example
from murley.ringlab import RingStructure
from murley.tcond import AlphaFamily
from murley.typesys import TypeDescriptor

SCHEMA_VERSION = "murley/1"
KINDS = ("family", "scheme", "ring", "report")


class MigrationError(ValueError):
    """A file written under a different schema version."""


class LoadError(ValueError):
    pass


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict | None) -> str:
    return hashlib.sha256(canonical(config or {}).encode()).hexdigest()


def envelope(kind: str, payload: dict, config: dict | None = None, timestamp: str | None = None) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown artifact kind {kind!r}")
    return {
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "config": config or {},
        "config_hash": config_hash(config),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "payload": payload,
    }


def payload_hash(env: dict) -> str:
    return hashlib.sha256(canonical({k: v for k, v in env.items() if k != "timestamp"}).encode()).hexdigest()


def check_schema(env: dict) -> None:
    found = env.get("schema")
    if found != SCHEMA_VERSION:
        raise MigrationError(f"schema {found!r} cannot be read as {SCHEMA_VERSION!r}; migrate the file first")


# -- groups -------------------------------------------------------------------


def group_to_json(G) -> dict:
    if isinstance(G, GroupScheme):
        return dict(G.to_json(), kind="murley")
    return G.to_json()


def group_from_json(d: dict, base: Path | None = None):
    kind = d.get("kind", "murley")
    if kind == "free":
        return FreeScheme(TypeDescriptor.from_json(d["type"]), int(d["n"]), int(d["K"]), tuple(d.get("window", ())))
    if kind == "prochazka":
        return build_prochazka_example(int(d["J"]), int(d["K"]))
    if kind != "murley":
        raise LoadError(f"unknown group kind {kind!r}")
    fam = None
    if "family_ref" in d:
        ref = Path(d["family_ref"])
        if base is not None and not ref.is_absolute():
            ref = base / ref
        if not ref.exists():
            raise LoadError(f"missing family reference {d['family_ref']!r}")
        fam = load(ref)
        if not isinstance(fam, AlphaFamily):
            raise LoadError(f"{d['family_ref']!r} is not a family")
    elif d.get("family") is None and int(d["n"]) > 1:
        raise LoadError("scheme of rank > 1 without a family")
    return GroupScheme.from_json(d, family=fam)


# -- save / load ----------------------------------------------------------------


def to_payload(obj) -> tuple[str, dict]:
    if isinstance(obj, AlphaFamily):
        return "family", obj.to_json()
    if isinstance(obj, (GroupScheme, FreeScheme, ProchazkaGroup)):
        return "scheme", group_to_json(obj)
    if isinstance(obj, RingStructure):
        d = obj.to_json()
        d["scheme"] = group_to_json(obj.group) if obj.group is not None else None
        return "ring", d
    if isinstance(obj, dict):
        return "report", obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_envelope(env: dict, base: Path | None = None):
    check_schema(env)
    kind, payload = env.get("kind"), env.get("payload")
    if kind == "family":
        return AlphaFamily.from_json(payload)
    if kind == "scheme":
        return group_from_json(payload, base)
    if kind == "ring":
        group = group_from_json(payload["scheme"], base) if payload.get("scheme") else None
        return RingStructure.from_json(payload, group)
    if kind == "report":
        return payload
    raise LoadError(f"unknown artifact kind {kind!r}")


def dumps(obj, config: dict | None = None, timestamp: str | None = None) -> str:
    kind, payload = to_payload(obj)
    return json.dumps(envelope(kind, payload, config, timestamp), indent=2, sort_keys=True) + "\n"


def save(obj, path, config: dict | None = None, family_ref: str | None = None) -> Path:
    """Write obj; a scheme may point at a saved family instead of inlining it."""
    path = Path(path)
    kind, payload = to_payload(obj)
    if kind == "scheme" and family_ref is not None:
        payload = dict(payload)
        payload.pop("family", None)
        payload["family_ref"] = family_ref
    path.write_text(json.dumps(envelope(kind, payload, config), indent=2, sort_keys=True) + "\n")
    return path


def read_envelope(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise LoadError(f"no such file {str(path)!r}")
    env = json.loads(path.read_text())
    check_schema(env)
    return env


def load(path):
    path = Path(path)
    return from_envelope(read_envelope(path), path.parent)
