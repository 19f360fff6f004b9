"""ATT&CK catalog model: techniques, mitigations, and their mapping.

A :class:`Catalog` is an immutable, canonically ordered snapshot of the
bipartite technique/mitigation graph.  It can be built from a STIX 2.1
bundle (the format ATT&CK releases are published in), from a pair of CSV
fixtures, or loaded from the canonical JSON form written by
:func:`save_catalog`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CatalogError, ParseError, SchemaVersionError, ValidationError

CATALOG_SCHEMA_VERSION = 1

_TECHNIQUE_ID_RE = re.compile(r"^T\d{4}(?:\.\d{3})?$")
_MITIGATION_ID_RE = re.compile(r"^M\d{4}$")


def parse_technique_id(value: str) -> str:
    """Validate a technique ID (``T1053`` or sub-technique ``T1053.005``)."""
    if not isinstance(value, str) or not _TECHNIQUE_ID_RE.match(value):
        raise ValidationError(f"invalid technique ID: {value!r}")
    return value


def parse_mitigation_id(value: str) -> str:
    """Validate a mitigation ID (``M1047``)."""
    if not isinstance(value, str) or not _MITIGATION_ID_RE.match(value):
        raise ValidationError(f"invalid mitigation ID: {value!r}")
    return value


def is_subtechnique(technique_id: str) -> bool:
    return "." in technique_id


def parent_technique(technique_id: str) -> str:
    """Parent of a sub-technique ID; a parent-level ID is its own parent."""
    parse_technique_id(technique_id)
    return technique_id.split(".", 1)[0]


@dataclass(frozen=True)
class Technique:
    id: str
    name: str = ""
    revoked: bool = False
    deprecated: bool = False

    def __post_init__(self):
        parse_technique_id(self.id)


@dataclass(frozen=True)
class Mitigation:
    id: str
    name: str = ""

    def __post_init__(self):
        parse_mitigation_id(self.id)


@dataclass(frozen=True)
class IngestStats:
    """Non-fatal ingest bookkeeping; excluded from catalog equality."""

    skipped_objects: int = 0
    dangling_refs: int = 0
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Catalog:
    """Immutable technique/mitigation catalog with referential integrity.

    ``mappings`` holds ``(mitigation_id, technique_id)`` pairs.  All three
    collections are kept sorted so that equal catalogs compare and
    serialize identically regardless of ingestion order.
    """

    techniques: tuple[Technique, ...]
    mitigations: tuple[Mitigation, ...]
    mappings: tuple[tuple[str, str], ...]
    meta: IngestStats = field(default_factory=IngestStats, compare=False)

    @classmethod
    def from_parts(cls, techniques, mitigations, mappings, meta=None) -> "Catalog":
        """Build a catalog from arbitrary iterables, sorting canonically."""
        return cls(
            techniques=tuple(sorted(techniques, key=lambda t: t.id)),
            mitigations=tuple(sorted(mitigations, key=lambda m: m.id)),
            mappings=tuple(sorted(tuple(p) for p in mappings)),
            meta=meta or IngestStats(),
        )

    def __post_init__(self):
        tids = [t.id for t in self.techniques]
        mids = [m.id for m in self.mitigations]
        if len(set(tids)) != len(tids):
            raise CatalogError("duplicate technique IDs in catalog")
        if len(set(mids)) != len(mids):
            raise CatalogError("duplicate mitigation IDs in catalog")
        if list(self.mappings) != sorted(set(self.mappings)):
            raise CatalogError("mappings must be unique and sorted")
        tid_set, mid_set = set(tids), set(mids)
        for mid, tid in self.mappings:
            if mid not in mid_set:
                raise CatalogError(f"mapping references unknown mitigation {mid}")
            if tid not in tid_set:
                raise CatalogError(f"mapping references unknown technique {tid}")

    def technique_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.techniques)

    def mitigation_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.mitigations)

    def has_technique(self, technique_id: str) -> bool:
        return any(t.id == technique_id for t in self.techniques)

    def mitigations_for(self, technique_id: str) -> tuple[str, ...]:
        """Mitigation IDs mapped to a technique, sorted."""
        return tuple(m for m, t in self.mappings if t == technique_id)

    def techniques_for(self, mitigation_id: str) -> tuple[str, ...]:
        """Technique IDs covered by a mitigation, sorted."""
        return tuple(sorted(t for m, t in self.mappings if m == mitigation_id))

    def mapping_count(self, technique_id: str) -> int:
        return sum(1 for _, t in self.mappings if t == technique_id)

    def mitigation_names(self) -> dict[str, str]:
        return {m.id: m.name for m in self.mitigations}


def collapse_subtechniques(catalog: Catalog) -> Catalog:
    """Fold every sub-technique into its parent technique.

    The parent is ensured present (created with an empty name when the
    source had no parent-level entry), mappings are re-targeted to the
    parent, and duplicates arising from the fold are dropped.  Collapsing
    an already collapsed catalog is a no-op.
    """
    by_id = {t.id: t for t in catalog.techniques}
    techniques: dict[str, Technique] = {}
    for tech in catalog.techniques:
        if is_subtechnique(tech.id):
            parent_id = parent_technique(tech.id)
            if parent_id not in by_id:
                techniques.setdefault(parent_id, Technique(id=parent_id))
        else:
            techniques[tech.id] = tech
    mappings = {(mid, parent_technique(tid)) for mid, tid in catalog.mappings}
    return Catalog.from_parts(
        techniques.values(), catalog.mitigations, mappings, meta=catalog.meta
    )


def _external_attack_id(obj: dict) -> str | None:
    for ref in obj.get("external_references", []) or []:
        if isinstance(ref, dict) and ref.get("source_name") == "mitre-attack":
            ext = ref.get("external_id")
            if ext:
                return ext
    return None


def parse_stix_bundle(
    data: bytes | str | dict,
    *,
    collapse: bool = True,
    include_deprecated: bool = False,
) -> Catalog:
    """Extract a catalog from a STIX 2.1 bundle.

    Techniques come from ``attack-pattern`` objects and mitigations from
    ``course-of-action`` objects, identified by their ``mitre-attack``
    external reference.  Mappings come from ``mitigates`` relationships.
    Objects flagged ``revoked`` or ``x_mitre_deprecated`` are dropped
    unless ``include_deprecated``.  With ``collapse`` (the default),
    sub-techniques are folded into their parents.

    Relationships whose endpoints cannot be resolved are skipped and
    counted in ``catalog.meta``; a structurally malformed bundle raises
    :class:`ParseError` naming the offending object index.
    """
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or data.get("type") != "bundle":
        raise ParseError("not a STIX bundle: top-level type must be 'bundle'")
    objects = data.get("objects")
    if not isinstance(objects, list):
        raise ParseError("not a STIX bundle: 'objects' must be an array")

    techniques: dict[str, Technique] = {}  # stix id -> entity
    mitigations: dict[str, Mitigation] = {}
    dropped: set[str] = set()  # stix ids dropped by the revoked/deprecated filter
    relationships: list[tuple[int, dict]] = []
    skipped = 0
    warnings: list[str] = []

    for index, obj in enumerate(objects):
        if not isinstance(obj, dict) or not isinstance(obj.get("type"), str):
            raise ParseError(f"malformed bundle object at index {index}")
        obj_type = obj["type"]
        if obj_type == "relationship":
            relationships.append((index, obj))
            continue
        if obj_type not in ("attack-pattern", "course-of-action"):
            skipped += 1
            continue
        stix_id = obj.get("id")
        if not isinstance(stix_id, str):
            raise ParseError(f"malformed bundle object at index {index}: missing id")
        attack_id = _external_attack_id(obj)
        if attack_id is None:
            skipped += 1
            continue
        revoked = bool(obj.get("revoked", False))
        deprecated = bool(obj.get("x_mitre_deprecated", False))
        if (revoked or deprecated) and not include_deprecated:
            dropped.add(stix_id)
            continue
        name = obj.get("name", "") or ""
        try:
            if obj_type == "attack-pattern":
                techniques[stix_id] = Technique(
                    id=parse_technique_id(attack_id),
                    name=name,
                    revoked=revoked,
                    deprecated=deprecated,
                )
            else:
                mitigations[stix_id] = Mitigation(
                    id=parse_mitigation_id(attack_id), name=name
                )
        except ValidationError:
            skipped += 1
            warnings.append(f"object {index}: unrecognized ATT&CK ID {attack_id!r}")

    mappings: set[tuple[str, str]] = set()
    dangling = 0
    for index, rel in relationships:
        if rel.get("relationship_type") != "mitigates":
            skipped += 1
            continue
        source = rel.get("source_ref")
        target = rel.get("target_ref")
        if source in dropped or target in dropped:
            continue  # endpoint filtered out together with its mappings
        mitigation = mitigations.get(source)
        technique = techniques.get(target)
        if mitigation is None or technique is None:
            dangling += 1
            warnings.append(f"relationship at index {index}: unresolved endpoint")
            continue
        mappings.add((mitigation.id, technique.id))

    # Distinct STIX objects can carry the same ATT&CK ID (re-released
    # entities); keep the first occurrence of each ID.
    uniq_techniques: dict[str, Technique] = {}
    for tech in techniques.values():
        uniq_techniques.setdefault(tech.id, tech)
    uniq_mitigations: dict[str, Mitigation] = {}
    for mit in mitigations.values():
        uniq_mitigations.setdefault(mit.id, mit)

    catalog = Catalog.from_parts(
        uniq_techniques.values(),
        uniq_mitigations.values(),
        mappings,
        meta=IngestStats(
            skipped_objects=skipped,
            dangling_refs=dangling,
            warnings=tuple(warnings),
        ),
    )
    if collapse:
        catalog = collapse_subtechniques(catalog)
    return catalog


def _decode_csv(data: bytes | str, label: str) -> list[str]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{label}: not valid UTF-8: {exc}") from exc
    return data.splitlines()


def _read_rows(data: bytes | str, label: str, header: str) -> list[list[str]]:
    """Split a CSV payload into data rows after checking its exact header."""
    import csv

    lines = _decode_csv(data, label)
    rows = list(csv.reader(lines))
    if not rows or ",".join(rows[0]) != header:
        raise ParseError(f"{label}: header must be exactly {header!r}")
    return [row for row in rows[1:] if row and any(cell.strip() for cell in row)]


def parse_mapping_csv(
    techniques_csv: bytes | str,
    mapping_csv: bytes | str,
    mitigations_csv: bytes | str | None = None,
) -> Catalog:
    """Build a catalog from tabular fixtures.

    ``techniques_csv`` has header ``technique_id,name``; ``mapping_csv``
    has header ``technique_id,mitigation_id`` with one pair per row.
    Mitigations are auto-registered from mapping rows with empty names
    unless an optional ``mitigations_csv`` (``mitigation_id,name``)
    supplies them.  A malformed ID or duplicate pair raises
    :class:`ParseError` citing the data row number; a mapping row naming
    a technique absent from ``techniques_csv`` is an error as well.
    """
    techniques: dict[str, Technique] = {}
    for rownum, row in enumerate(
        _read_rows(techniques_csv, "techniques CSV", "technique_id,name"), start=1
    ):
        if len(row) != 2:
            raise ParseError(f"techniques CSV row {rownum}: expected 2 columns")
        tid, name = row[0].strip(), row[1]
        try:
            parse_technique_id(tid)
        except ValidationError as exc:
            raise ParseError(f"techniques CSV row {rownum}: {exc}") from exc
        if tid in techniques:
            raise ParseError(f"techniques CSV row {rownum}: duplicate technique {tid}")
        techniques[tid] = Technique(id=tid, name=name)

    names: dict[str, str] = {}
    if mitigations_csv is not None:
        for rownum, row in enumerate(
            _read_rows(mitigations_csv, "mitigations CSV", "mitigation_id,name"),
            start=1,
        ):
            if len(row) != 2:
                raise ParseError(f"mitigations CSV row {rownum}: expected 2 columns")
            mid, name = row[0].strip(), row[1]
            try:
                parse_mitigation_id(mid)
            except ValidationError as exc:
                raise ParseError(f"mitigations CSV row {rownum}: {exc}") from exc
            if mid in names:
                raise ParseError(
                    f"mitigations CSV row {rownum}: duplicate mitigation {mid}"
                )
            names[mid] = name

    mappings: set[tuple[str, str]] = set()
    mitigations: dict[str, Mitigation] = {}
    for rownum, row in enumerate(
        _read_rows(mapping_csv, "mapping CSV", "technique_id,mitigation_id"), start=1
    ):
        if len(row) != 2:
            raise ParseError(f"mapping CSV row {rownum}: expected 2 columns")
        tid, mid = row[0].strip(), row[1].strip()
        try:
            parse_technique_id(tid)
            parse_mitigation_id(mid)
        except ValidationError as exc:
            raise ParseError(f"mapping CSV row {rownum}: {exc}") from exc
        if tid not in techniques:
            raise ParseError(
                f"mapping CSV row {rownum}: technique {tid} not in techniques CSV"
            )
        pair = (mid, tid)
        if pair in mappings:
            raise ParseError(f"mapping CSV row {rownum}: duplicate pair {mid},{tid}")
        mappings.add(pair)
        mitigations.setdefault(mid, Mitigation(id=mid, name=names.get(mid, "")))

    # Named mitigations that never appear in the mapping are still listed.
    for mid, name in names.items():
        mitigations.setdefault(mid, Mitigation(id=mid, name=name))

    return Catalog.from_parts(techniques.values(), mitigations.values(), mappings)


def catalog_to_dict(catalog: Catalog) -> dict:
    return {
        "schema_version": CATALOG_SCHEMA_VERSION,
        "techniques": [
            {
                "id": t.id,
                "name": t.name,
                "revoked": t.revoked,
                "deprecated": t.deprecated,
            }
            for t in catalog.techniques
        ],
        "mitigations": [{"id": m.id, "name": m.name} for m in catalog.mitigations],
        "mappings": [[mid, tid] for mid, tid in catalog.mappings],
    }


def dumps_catalog(catalog: Catalog) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, entities sorted by ID."""
    doc = catalog_to_dict(catalog)
    return (
        json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    ).encode("utf-8")


def loads_catalog(data: bytes | str) -> Catalog:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"catalog file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("catalog document must be a JSON object")
    version = doc.get("schema_version")
    if version != CATALOG_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported catalog schema version {version!r} "
            f"(expected {CATALOG_SCHEMA_VERSION})"
        )
    try:
        techniques = [
            Technique(
                id=entry["id"],
                name=entry.get("name", ""),
                revoked=bool(entry.get("revoked", False)),
                deprecated=bool(entry.get("deprecated", False)),
            )
            for entry in doc.get("techniques", [])
        ]
        mitigations = [
            Mitigation(id=entry["id"], name=entry.get("name", ""))
            for entry in doc.get("mitigations", [])
        ]
        mappings = [(pair[0], pair[1]) for pair in doc.get("mappings", [])]
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed catalog document: {exc}") from exc
    return Catalog.from_parts(techniques, mitigations, mappings)


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_bytes(dumps_catalog(catalog))


def load_catalog(path: str | Path) -> Catalog:
    return loads_catalog(Path(path).read_bytes())


def catalog_sha256(catalog: Catalog) -> str:
    """Hex digest of the canonical serialization; used for plan provenance."""
    import hashlib

    return hashlib.sha256(dumps_catalog(catalog)).hexdigest()
