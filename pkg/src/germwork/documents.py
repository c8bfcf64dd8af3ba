"""Workspace documents: JSON envelopes around semigroups, actions and friends.

A document is ``{"kind": ..., "name": ..., "payload": ...}``.  Serialization is
canonical (sorted keys, two-space indent, trailing newline), so export,
re-import and export again gives the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .catalog import WorkspaceDocument, catalog
from .category import FiniteCategory
from .constellation import Constellation
from .core import PartialMap, UnarySemigroup
from .errors import GermworkError, SchemaError
from .germs import RestrictionAction
from .lattice import FinSemilattice
from .proper import MonoidPartialAction

KINDS = ("semigroup", "semilattice", "action", "partial-action", "constellation", "category")


def payload_to_json(kind, obj):
    if kind == "action":
        doc = {"semigroup": obj.semigroup.to_json(), **obj.to_json()}
        if obj.point_labels is not None:
            doc["point_labels"] = list(obj.point_labels)
        return doc
    if kind == "partial-action":
        action, family = obj
        return action.to_json(family)
    return obj.to_json()


def payload_from_json(kind, data, force=False):
    """Build the in-memory object for a payload; schema problems raise SchemaError."""
    try:
        if kind == "semigroup":
            return UnarySemigroup.from_json(data, force=force)
        if kind == "semilattice":
            return FinSemilattice.from_json(data)
        if kind == "action":
            S = UnarySemigroup.from_json(data["semigroup"], force=force)
            theta = tuple(PartialMap.from_json(m) for m in data["theta"])
            labels = data.get("point_labels")
            return RestrictionAction(
                S, int(data["space"]), theta, None if labels is None else tuple(labels)
            )
        if kind == "partial-action":
            return MonoidPartialAction.from_json(data)
        if kind == "constellation":
            return Constellation.from_json(data)
        if kind == "category":
            return FiniteCategory.from_json(data)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise SchemaError(f"bad {kind} payload: {exc!r}") from None
    raise SchemaError(f"unknown document kind {kind!r}; expected one of {', '.join(KINDS)}")


def document_to_json(doc: WorkspaceDocument):
    return {"kind": doc.kind, "name": doc.name, "payload": payload_to_json(doc.kind, doc.payload)}


def dumps(data):
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_document(doc: WorkspaceDocument):
    return dumps(document_to_json(doc))


def load_document(text, force=False):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not JSON: {exc}") from None
    if not isinstance(data, dict) or "kind" not in data or "payload" not in data:
        raise SchemaError("a document needs 'kind' and 'payload'")
    kind = data["kind"]
    if kind not in KINDS:
        raise SchemaError(f"unknown document kind {kind!r}")
    try:
        obj = payload_from_json(kind, data["payload"], force=force)
    except SchemaError:
        raise
    except GermworkError as exc:
        raise SchemaError(f"invalid {kind}: {exc}") from None
    return WorkspaceDocument(kind, str(data.get("name", "")), obj)


def resolve(ref: str, force=False):
    """``catalog:NAME`` or a path to a JSON document."""
    if ref.startswith("catalog:"):
        return catalog(ref[len("catalog:"):])
    path = Path(ref)
    if not path.is_file():
        raise SchemaError(f"no such file: {ref}")
    return load_document(path.read_text(encoding="utf-8"), force=force)
