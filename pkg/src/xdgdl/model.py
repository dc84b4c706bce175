"""Document model for grid data-distribution descriptors.

A descriptor is a small XML dialect: a ``PARSTORAGE`` root carries the
logical description (processor arrays, type declarations, alignments) and
the physical description (an ``ISLAND`` of servers, each with storage
devices).  Every device either holds a recursive ``VIEW``/``BLOCK``
selection pattern or an explicit ``NOVIEW`` marker.

This module owns the in-memory tree (frozen dataclasses), parsing from XML
text, structural validation, and canonical serialization.  Validation is
coded directly against the grammar rules; the emitted ``XDGDL.dtd``
doctype reference is never fetched, so parsing stays hermetic.
"""

from __future__ import annotations

import codecs
import enum
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from xml.sax.saxutils import quoteattr

from .errors import InvalidDocument, ParseError, ValidationError

__all__ = [
    "Major",
    "Distribution",
    "EtypeDecl",
    "ArrayDecl",
    "CompoundDecl",
    "TypeDecl",
    "DimensionDecl",
    "ProcessorsDecl",
    "AlignDecl",
    "ByteBlock",
    "BlockDecl",
    "ViewDecl",
    "DeviceDecl",
    "ServerDecl",
    "IslandDecl",
    "Document",
    "Violation",
    "ValidationReport",
    "parse_document",
    "validate_document",
    "serialize_document",
    "declared_names",
]


class Major(enum.Enum):
    ROW = "ROW"
    COLUMN = "COLUMN"


class Distribution(enum.Enum):
    BLOCK = "BLOCK"
    CYCLIC = "CYCLIC"
    NO = "NO"
    UNSPECIFIED = "UNSPECIFIED"


def _freeze(obj, name: str) -> None:
    object.__setattr__(obj, name, tuple(getattr(obj, name)))


@dataclass(frozen=True)
class EtypeDecl:
    """Primitive element type: a named base type of a fixed byte length."""

    base: str
    length_bytes: int
    name: str | None = None


@dataclass(frozen=True)
class DimensionDecl:
    """One array dimension with an optional element-to-target distribution."""

    upper: int
    lower: int = 1
    distribute: Distribution = Distribution.UNSPECIFIED
    dist_skalar: int = 1

    @property
    def extent(self) -> int:
        return self.upper - self.lower + 1


@dataclass(frozen=True)
class ArrayDecl:
    """Homogeneous array of an element type over one or more dimensions."""

    element: "TypeDecl"
    dims: tuple[DimensionDecl, ...]
    major: Major = Major.ROW
    distribute_onto: str | None = None
    name: str | None = None

    def __post_init__(self):
        _freeze(self, "dims")


@dataclass(frozen=True)
class CompoundDecl:
    """A TYPE element: groups one or more child type declarations."""

    children: tuple["TypeDecl", ...]
    name: str | None = None
    typename: str | None = None

    def __post_init__(self):
        _freeze(self, "children")


TypeDecl = EtypeDecl | ArrayDecl | CompoundDecl


@dataclass(frozen=True)
class ProcessorsDecl:
    """Named processor array; dims are (lower, upper) index bounds."""

    name: str
    dims: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple((l, u) for l, u in self.dims))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(u - l + 1 for l, u in self.dims)


@dataclass(frozen=True)
class AlignDecl:
    what: str
    with_target: str


@dataclass(frozen=True)
class ByteBlock:
    """Leaf marker: a take's unit is one raw byte."""


@dataclass(frozen=True)
class BlockDecl:
    """One stanza of a view.

    Skips ``offset`` bytes, then lays down ``repeat`` takes of ``count``
    units separated by ``stride``-byte gaps (no gap after the last take).
    The unit is one byte for a ByteBlock child and one full inner period
    for a nested view child.
    """

    offset: int
    repeat: int
    count: int
    stride: int
    child: "ViewDecl | ByteBlock"


@dataclass(frozen=True)
class ViewDecl:
    """Periodic byte-selection pattern over a region.

    ``skip_header`` bytes are consumed once at the start of the region;
    ``skip`` trailing bytes are appended to every period.
    """

    skip_header: int
    skip: int
    blocks: tuple[BlockDecl, ...]

    def __post_init__(self):
        _freeze(self, "blocks")


@dataclass(frozen=True)
class DeviceDecl:
    """Storage device; holds a view or an explicit no-view marker."""

    device_id: str
    view: ViewDecl | None = None
    noview: bool = False


@dataclass(frozen=True)
class ServerDecl:
    host: str
    devices: tuple[DeviceDecl, ...] = ()

    def __post_init__(self):
        _freeze(self, "devices")


@dataclass(frozen=True)
class IslandDecl:
    name: str
    servers: tuple[ServerDecl, ...] = ()

    def __post_init__(self):
        _freeze(self, "servers")


@dataclass(frozen=True)
class Document:
    """Parsed descriptor: logical types plus the island placement tree."""

    version: str
    timestamp: str
    types: tuple[TypeDecl, ...]
    island: IslandDecl
    processors: tuple[ProcessorsDecl, ...] = ()
    aligns: tuple[AlignDecl, ...] = ()

    def __post_init__(self):
        _freeze(self, "types")
        _freeze(self, "processors")
        _freeze(self, "aligns")


@dataclass(frozen=True)
class Violation:
    rule: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    def __post_init__(self):
        _freeze(self, "violations")
        _freeze(self, "warnings")

    @property
    def ok(self) -> bool:
        return not self.violations


# --------------------------------------------------------------------------
# parsing

# tag -> (allowed attributes, required attributes)
_ELEMENT_ATTRS: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "PARSTORAGE": (frozenset({"VERSION", "TIMESTAMP"}), frozenset({"VERSION", "TIMESTAMP"})),
    "PROCESSORS": (frozenset({"NAME"}), frozenset({"NAME"})),
    "PROC_DIMENSION": (frozenset({"LOWER", "UPPER"}), frozenset({"UPPER"})),
    "TYPE": (frozenset({"TYPENAME", "NAME"}), frozenset()),
    "ETYPE": (frozenset({"TYPE", "LENGTH", "NAME"}), frozenset({"TYPE", "LENGTH"})),
    "ARRAY": (frozenset({"NAME", "MAJOR", "DISTRIBUTE_ONTO"}), frozenset()),
    "DIMENSION": (frozenset({"LOWER", "UPPER", "DISTRIBUTE", "DIST_SKALAR"}), frozenset({"UPPER"})),
    "ALIGN": (frozenset({"WHAT", "WITH"}), frozenset({"WHAT", "WITH"})),
    "ISLAND": (frozenset({"NAME"}), frozenset({"NAME"})),
    "SERVER": (frozenset({"HOST"}), frozenset({"HOST"})),
    "DEVICE": (frozenset({"DEVICE_ID"}), frozenset({"DEVICE_ID"})),
    "VIEW": (frozenset({"SKIP_HEADER", "SKIP"}), frozenset({"SKIP_HEADER", "SKIP"})),
    "NOVIEW": (frozenset(), frozenset()),
    "BLOCK": (frozenset({"OFFSET", "REPEAT", "COUNT", "STRIDE"}), frozenset({"OFFSET", "REPEAT", "COUNT", "STRIDE"})),
    "BYTEBLOCK": (frozenset(), frozenset()),
}

# base-10 integers only; leading zeros accepted, leading '+' rejected
_INT_RE = re.compile(r"-?[0-9]+\Z")
_DECL_ENCODING_RE = re.compile(rb"^\s*<\?xml[^>]*?encoding\s*=\s*[\"']([A-Za-z][A-Za-z0-9._-]*)[\"']")


def _as_bytes(xml_text: str | bytes) -> bytes:
    """Return parser input bytes, honoring a declared encoding on str input.

    The stock expat front end refuses unicode strings that carry an
    encoding declaration, so declared-encoding strings are re-encoded to
    the declared charset (unencodable characters become character
    references, which survive the round-trip).
    """
    if isinstance(xml_text, bytes):
        return xml_text
    m = _DECL_ENCODING_RE.match(xml_text[:200].encode("ascii", "replace"))
    encoding = m.group(1).decode("ascii") if m else "utf-8"
    try:
        codecs.lookup(encoding)
    except LookupError:
        raise ParseError(f"unknown encoding {encoding!r}", 1, 0) from None
    return xml_text.encode(encoding, errors="xmlcharrefreplace")


def parse_document(xml_text: str | bytes) -> Document:
    """Parse descriptor XML into a Document.

    Raises ParseError (with line/column) for malformed XML and
    ValidationError for structure the model cannot represent: unknown or
    misplaced elements, unknown or missing attributes, and attribute
    values that are not base-10 integers where one is required.
    Representable rule breaks (an empty VIEW, a dangling reference, a
    negative stride) parse fine and are left for validate_document.
    """
    data = _as_bytes(xml_text)
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        message = str(exc).split(": line ")[0]  # expat repeats the position
        raise ParseError(message, line, column) from exc
    if root.tag != "PARSTORAGE":
        raise ValidationError("unexpected-element", f"/{root.tag}", "document root must be PARSTORAGE")
    return _build_document(root, "/PARSTORAGE")


def _reject_child(tag: str, path: str, parent: str) -> ValidationError:
    if tag not in _ELEMENT_ATTRS:
        return ValidationError("unknown-element", path, f"unknown element {tag}")
    return ValidationError("unexpected-element", path, f"{tag} is not allowed under {parent}")


def _check_element(elem: ET.Element, path: str) -> None:
    tag = elem.tag
    if tag not in _ELEMENT_ATTRS:
        raise ValidationError("unknown-element", path, f"unknown element {tag}")
    allowed, required = _ELEMENT_ATTRS[tag]
    for attr in elem.attrib:
        if attr not in allowed:
            raise ValidationError("unknown-attribute", path, f"unknown attribute {attr!r} on {tag}")
    for attr in required:
        if attr not in elem.attrib:
            raise ValidationError("required-attribute", path, f"{tag} requires attribute {attr}")
    if elem.text and elem.text.strip():
        raise ValidationError("unexpected-text", path, f"{tag} must not contain text")
    for child in elem:
        if child.tail and child.tail.strip():
            raise ValidationError("unexpected-text", path, f"{tag} must not contain text")


def _int_attr(elem: ET.Element, attr: str, path: str, default: int | None = None) -> int:
    raw = elem.get(attr)
    if raw is None:
        assert default is not None, f"required integer attribute {attr} unchecked"
        return default
    if not _INT_RE.match(raw):
        raise ValidationError("bad-integer", path, f"attribute {attr} must be a base-10 integer, got {raw!r}")
    return int(raw)


def _children(elem: ET.Element, path: str) -> list[tuple[ET.Element, str]]:
    """Children paired with their sibling-indexed paths."""
    seen: dict[str, int] = {}
    out = []
    for child in elem:
        if not isinstance(child.tag, str):  # comments / processing instructions
            continue
        seen[child.tag] = seen.get(child.tag, 0) + 1
        out.append((child, f"{path}/{child.tag}[{seen[child.tag]}]"))
    return out


def _build_document(elem: ET.Element, path: str) -> Document:
    _check_element(elem, path)
    processors: list[ProcessorsDecl] = []
    types: list[TypeDecl] = []
    aligns: list[AlignDecl] = []
    islands: list[IslandDecl] = []
    for child, cpath in _children(elem, path):
        tag = child.tag
        if tag == "PROCESSORS":
            processors.append(_build_processors(child, cpath))
        elif tag == "TYPE":
            types.append(_build_type(child, cpath))
        elif tag == "ALIGN":
            aligns.append(_build_align(child, cpath))
        elif tag == "ISLAND":
            islands.append(_build_island(child, cpath))
        else:
            raise _reject_child(tag, cpath, "PARSTORAGE")
    if len(islands) != 1:
        raise ValidationError("parstorage-structure", path, f"PARSTORAGE requires exactly one ISLAND, found {len(islands)}")
    return Document(
        version=elem.get("VERSION", ""),
        timestamp=elem.get("TIMESTAMP", ""),
        types=tuple(types),
        island=islands[0],
        processors=tuple(processors),
        aligns=tuple(aligns),
    )


def _build_processors(elem: ET.Element, path: str) -> ProcessorsDecl:
    _check_element(elem, path)
    dims = []
    for child, cpath in _children(elem, path):
        if child.tag != "PROC_DIMENSION":
            raise _reject_child(child.tag, cpath, "PROCESSORS")
        _check_element(child, cpath)
        dims.append((_int_attr(child, "LOWER", cpath, default=1), _int_attr(child, "UPPER", cpath)))
    return ProcessorsDecl(name=elem.get("NAME", ""), dims=tuple(dims))


def _build_type(elem: ET.Element, path: str) -> CompoundDecl:
    _check_element(elem, path)
    children = []
    for child, cpath in _children(elem, path):
        children.append(_build_type_child(child, cpath))
    return CompoundDecl(children=tuple(children), name=elem.get("NAME"), typename=elem.get("TYPENAME"))


def _build_type_child(elem: ET.Element, path: str) -> TypeDecl:
    tag = elem.tag
    if tag == "ETYPE":
        _check_element(elem, path)
        return EtypeDecl(base=elem.get("TYPE", ""), length_bytes=_int_attr(elem, "LENGTH", path), name=elem.get("NAME"))
    if tag == "ARRAY":
        return _build_array(elem, path)
    if tag == "TYPE":
        return _build_type(elem, path)
    raise _reject_child(tag, path, "TYPE")


def _build_array(elem: ET.Element, path: str) -> ArrayDecl:
    _check_element(elem, path)
    element: TypeDecl | None = None
    dims: list[DimensionDecl] = []
    for child, cpath in _children(elem, path):
        if child.tag == "DIMENSION":
            _check_element(child, cpath)
            raw_dist = child.get("DISTRIBUTE")
            if raw_dist is None:
                dist = Distribution.UNSPECIFIED
            elif raw_dist in ("BLOCK", "CYCLIC", "NO"):
                dist = Distribution(raw_dist)
            else:
                raise ValidationError("bad-enum", cpath, f"DISTRIBUTE must be BLOCK, CYCLIC or NO, got {raw_dist!r}")
            dims.append(
                DimensionDecl(
                    upper=_int_attr(child, "UPPER", cpath),
                    lower=_int_attr(child, "LOWER", cpath, default=1),
                    distribute=dist,
                    dist_skalar=_int_attr(child, "DIST_SKALAR", cpath, default=1),
                )
            )
        elif child.tag in ("TYPE", "ETYPE", "ARRAY"):
            if element is not None:
                raise ValidationError("array-structure", cpath, "ARRAY allows a single element type")
            element = _build_type_child(child, cpath)
        else:
            raise _reject_child(child.tag, cpath, "ARRAY")
    if element is None:
        raise ValidationError("array-structure", path, "ARRAY requires an element type child")
    raw_major = elem.get("MAJOR")
    if raw_major is None:
        major = Major.ROW
    elif raw_major in ("ROW", "COLUMN"):
        major = Major(raw_major)
    else:
        raise ValidationError("bad-enum", path, f"MAJOR must be ROW or COLUMN, got {raw_major!r}")
    return ArrayDecl(
        element=element,
        dims=tuple(dims),
        major=major,
        distribute_onto=elem.get("DISTRIBUTE_ONTO"),
        name=elem.get("NAME"),
    )


def _build_align(elem: ET.Element, path: str) -> AlignDecl:
    _check_element(elem, path)
    if len(elem):
        raise ValidationError("unexpected-element", path, "ALIGN must be empty")
    return AlignDecl(what=elem.get("WHAT", ""), with_target=elem.get("WITH", ""))


def _build_island(elem: ET.Element, path: str) -> IslandDecl:
    _check_element(elem, path)
    servers = []
    for child, cpath in _children(elem, path):
        if child.tag != "SERVER":
            raise _reject_child(child.tag, cpath, "ISLAND")
        servers.append(_build_server(child, cpath))
    return IslandDecl(name=elem.get("NAME", ""), servers=tuple(servers))


def _build_server(elem: ET.Element, path: str) -> ServerDecl:
    _check_element(elem, path)
    devices = []
    for child, cpath in _children(elem, path):
        if child.tag != "DEVICE":
            raise _reject_child(child.tag, cpath, "SERVER")
        devices.append(_build_device(child, cpath))
    return ServerDecl(host=elem.get("HOST", ""), devices=tuple(devices))


def _build_device(elem: ET.Element, path: str) -> DeviceDecl:
    _check_element(elem, path)
    view: ViewDecl | None = None
    noview = False
    for child, cpath in _children(elem, path):
        if child.tag == "VIEW":
            if view is not None:
                raise ValidationError("device-access", cpath, "DEVICE allows a single VIEW")
            view = _build_view(child, cpath)
        elif child.tag == "NOVIEW":
            _check_element(child, cpath)
            if len(child):
                raise ValidationError("unexpected-element", cpath, "NOVIEW must be empty")
            if noview:
                raise ValidationError("device-access", cpath, "DEVICE allows a single NOVIEW")
            noview = True
        else:
            raise _reject_child(child.tag, cpath, "DEVICE")
    return DeviceDecl(device_id=elem.get("DEVICE_ID", ""), view=view, noview=noview)


def _build_view(elem: ET.Element, path: str) -> ViewDecl:
    _check_element(elem, path)
    blocks = []
    for child, cpath in _children(elem, path):
        if child.tag != "BLOCK":
            raise _reject_child(child.tag, cpath, "VIEW")
        blocks.append(_build_block(child, cpath))
    return ViewDecl(
        skip_header=_int_attr(elem, "SKIP_HEADER", path),
        skip=_int_attr(elem, "SKIP", path),
        blocks=tuple(blocks),
    )


def _build_block(elem: ET.Element, path: str) -> BlockDecl:
    _check_element(elem, path)
    kids = _children(elem, path)
    if len(kids) != 1:
        raise ValidationError("block-child", path, f"BLOCK requires exactly one VIEW or BYTEBLOCK child, found {len(kids)}")
    child, cpath = kids[0]
    if child.tag == "BYTEBLOCK":
        _check_element(child, cpath)
        body: ViewDecl | ByteBlock = ByteBlock()
    elif child.tag == "VIEW":
        body = _build_view(child, cpath)
    else:
        raise ValidationError("block-child", cpath, f"{child.tag} is not allowed under BLOCK")
    return BlockDecl(
        offset=_int_attr(elem, "OFFSET", path),
        repeat=_int_attr(elem, "REPEAT", path),
        count=_int_attr(elem, "COUNT", path),
        stride=_int_attr(elem, "STRIDE", path),
        child=body,
    )


# --------------------------------------------------------------------------
# validation


def _is_xml_id(value: str) -> bool:
    if not value:
        return False
    first = value[0]
    if not (first.isalpha() or first == "_"):
        return False
    return all(c.isalnum() or c in "._-:" for c in value)


def declared_names(doc: Document) -> set[str]:
    """All NAME attributes resolvable by ALIGN and DISTRIBUTE_ONTO."""
    names = {p.name for p in doc.processors if p.name}

    def walk(t: TypeDecl) -> None:
        if t.name:
            names.add(t.name)
        if isinstance(t, CompoundDecl):
            for c in t.children:
                walk(c)
        elif isinstance(t, ArrayDecl):
            walk(t.element)

    for t in doc.types:
        walk(t)
    return names


class _Collector:
    def __init__(self):
        self.violations: list[Violation] = []
        self.warnings: list[Violation] = []

    def bad(self, rule: str, path: str, message: str) -> None:
        self.violations.append(Violation(rule, path, message))

    def warn(self, rule: str, path: str, message: str) -> None:
        self.warnings.append(Violation(rule, path, message))


def validate_document(doc: Document) -> ValidationReport:
    """Check every structural rule; violations are data, not exceptions."""
    out = _Collector()
    names = declared_names(doc)
    proc_names = {p.name for p in doc.processors if p.name}

    if not doc.version:
        out.bad("required-nonempty", "/PARSTORAGE", "VERSION must be nonempty")
    if not _is_xml_id(doc.timestamp):
        out.bad("timestamp-id", "/PARSTORAGE", f"TIMESTAMP must be an XML ID (letter or underscore first, no spaces), got {doc.timestamp!r}")
    if not doc.types:
        out.bad("parstorage-types", "/PARSTORAGE", "at least one TYPE declaration is required")

    for i, p in enumerate(doc.processors, 1):
        path = f"/PARSTORAGE/PROCESSORS[{i}]"
        if not p.name:
            out.bad("required-nonempty", path, "NAME must be nonempty")
        if not p.dims:
            out.bad("processors-dimensions", path, "PROCESSORS requires at least one PROC_DIMENSION")
        for j, (lo, up) in enumerate(p.dims, 1):
            if lo > up:
                out.bad("dimension-range", f"{path}/PROC_DIMENSION[{j}]", f"LOWER {lo} exceeds UPPER {up}")

    for i, t in enumerate(doc.types, 1):
        _validate_type(t, f"/PARSTORAGE/TYPE[{i}]", proc_names, out)

    for i, a in enumerate(doc.aligns, 1):
        path = f"/PARSTORAGE/ALIGN[{i}]"
        if not a.what:
            out.bad("required-nonempty", path, "WHAT must be nonempty")
        elif a.what not in names:
            out.bad("unresolved-align", path, f"WHAT={a.what!r} names no declared TYPE, ARRAY or PROCESSORS")
        if not a.with_target:
            out.bad("required-nonempty", path, "WITH must be nonempty")
        elif a.with_target not in names:
            out.bad("unresolved-align", path, f"WITH={a.with_target!r} names no declared TYPE, ARRAY or PROCESSORS")

    ipath = "/PARSTORAGE/ISLAND[1]"
    if not doc.island.name:
        out.bad("required-nonempty", ipath, "NAME must be nonempty")
    if not doc.island.servers:
        out.warn("island-empty", ipath, "island declares no servers; nothing can be placed")
    for i, srv in enumerate(doc.island.servers, 1):
        spath = f"{ipath}/SERVER[{i}]"
        if not srv.host:
            out.bad("required-nonempty", spath, "HOST must be nonempty")
        if not srv.devices:
            out.warn("server-empty", spath, "server declares no devices")
        for j, dev in enumerate(srv.devices, 1):
            dpath = f"{spath}/DEVICE[{j}]"
            if not dev.device_id:
                out.bad("required-nonempty", dpath, "DEVICE_ID must be nonempty")
            if (dev.view is None) == (not dev.noview):
                out.bad("device-access", dpath, "DEVICE requires exactly one of VIEW or NOVIEW")
            if dev.view is not None:
                _validate_view(dev.view, f"{dpath}/VIEW[1]", out)

    return ValidationReport(tuple(out.violations), tuple(out.warnings))


def _validate_type(t: TypeDecl, path: str, proc_names: set[str], out: _Collector) -> None:
    if isinstance(t, EtypeDecl):
        if not t.base:
            out.bad("required-nonempty", path, "TYPE attribute must be nonempty")
        if t.length_bytes < 1:
            out.bad("positive-int", path, f"LENGTH must be >= 1, got {t.length_bytes}")
    elif isinstance(t, CompoundDecl):
        if not t.children:
            out.bad("type-children", path, "TYPE requires at least one ETYPE, ARRAY or TYPE child")
        for i, c in enumerate(t.children, 1):
            tag = {"EtypeDecl": "ETYPE", "ArrayDecl": "ARRAY", "CompoundDecl": "TYPE"}[type(c).__name__]
            _validate_type(c, f"{path}/{tag}[{i}]", proc_names, out)
    else:
        if not t.dims:
            out.bad("array-dimensions", path, "ARRAY requires at least one DIMENSION")
        for i, d in enumerate(t.dims, 1):
            dpath = f"{path}/DIMENSION[{i}]"
            if d.lower > d.upper:
                out.bad("dimension-range", dpath, f"LOWER {d.lower} exceeds UPPER {d.upper}")
            if d.dist_skalar < 1:
                out.bad("positive-int", dpath, f"DIST_SKALAR must be >= 1, got {d.dist_skalar}")
            if d.distribute is Distribution.BLOCK and d.dist_skalar != 1:
                out.warn("block-dist-skalar", dpath, "DIST_SKALAR has no effect on BLOCK distribution")
        if t.distribute_onto is not None and t.distribute_onto not in proc_names:
            out.bad("unresolved-processors", path, f"DISTRIBUTE_ONTO={t.distribute_onto!r} names no declared PROCESSORS")
        _validate_type(t.element, f"{path}/TYPE[1]", proc_names, out)


def _validate_view(v: ViewDecl, path: str, out: _Collector) -> None:
    if v.skip_header < 0:
        out.bad("nonnegative-int", path, f"SKIP_HEADER must be >= 0, got {v.skip_header}")
    if v.skip < 0:
        out.bad("nonnegative-int", path, f"SKIP must be >= 0, got {v.skip}")
    if not v.blocks:
        out.bad("view-blocks", path, "VIEW requires at least one BLOCK")
    for i, b in enumerate(v.blocks, 1):
        bpath = f"{path}/BLOCK[{i}]"
        if b.offset < 0:
            out.bad("nonnegative-int", bpath, f"OFFSET must be >= 0, got {b.offset}")
        if b.stride < 0:
            out.bad("nonnegative-int", bpath, f"STRIDE must be >= 0, got {b.stride}")
        if b.repeat < 1:
            out.bad("positive-int", bpath, f"REPEAT must be >= 1, got {b.repeat}")
        if b.count < 1:
            out.bad("positive-int", bpath, f"COUNT must be >= 1, got {b.count}")
        if isinstance(b.child, ViewDecl):
            _validate_view(b.child, f"{bpath}/VIEW[1]", out)


# --------------------------------------------------------------------------
# serialization

_DECLARATION = '<?xml version="1.0" encoding="ISO-8859-1"?>'
_DOCTYPE = '<!DOCTYPE PARSTORAGE SYSTEM "XDGDL.dtd">'


def serialize_document(doc: Document) -> str:
    """Emit canonical XML text for a valid document.

    Attribute defaults are written explicitly; parse_document on the
    result rebuilds a structurally equal Document.
    """
    report = validate_document(doc)
    if not report.ok:
        raise InvalidDocument(report)
    lines = [_DECLARATION, _DOCTYPE]
    attrs = f'VERSION={quoteattr(doc.version)} TIMESTAMP={quoteattr(doc.timestamp)}'
    lines.append(f"<PARSTORAGE {attrs}>")
    for p in doc.processors:
        lines.append(f"  <PROCESSORS NAME={quoteattr(p.name)}>")
        for lo, up in p.dims:
            lines.append(f'    <PROC_DIMENSION LOWER="{lo}" UPPER="{up}"/>')
        lines.append("  </PROCESSORS>")
    for t in doc.types:
        _emit_type(t, lines, "  ")
    for a in doc.aligns:
        lines.append(f"  <ALIGN WHAT={quoteattr(a.what)} WITH={quoteattr(a.with_target)}/>")
    lines.append(f"  <ISLAND NAME={quoteattr(doc.island.name)}>")
    for srv in doc.island.servers:
        if srv.devices:
            lines.append(f"    <SERVER HOST={quoteattr(srv.host)}>")
            for dev in srv.devices:
                _emit_device(dev, lines, "      ")
            lines.append("    </SERVER>")
        else:
            lines.append(f"    <SERVER HOST={quoteattr(srv.host)}/>")
    lines.append("  </ISLAND>")
    lines.append("</PARSTORAGE>")
    return "\n".join(lines) + "\n"


def _emit_type(t: TypeDecl, lines: list[str], indent: str) -> None:
    if isinstance(t, EtypeDecl):
        extra = f" NAME={quoteattr(t.name)}" if t.name is not None else ""
        lines.append(f'{indent}<ETYPE TYPE={quoteattr(t.base)} LENGTH="{t.length_bytes}"{extra}/>')
    elif isinstance(t, CompoundDecl):
        attrs = ""
        if t.typename is not None:
            attrs += f" TYPENAME={quoteattr(t.typename)}"
        if t.name is not None:
            attrs += f" NAME={quoteattr(t.name)}"
        lines.append(f"{indent}<TYPE{attrs}>")
        for c in t.children:
            _emit_type(c, lines, indent + "  ")
        lines.append(f"{indent}</TYPE>")
    else:
        attrs = ""
        if t.name is not None:
            attrs += f" NAME={quoteattr(t.name)}"
        attrs += f' MAJOR="{t.major.value}"'
        if t.distribute_onto is not None:
            attrs += f" DISTRIBUTE_ONTO={quoteattr(t.distribute_onto)}"
        lines.append(f"{indent}<ARRAY{attrs}>")
        _emit_type(t.element, lines, indent + "  ")
        for d in t.dims:
            dist = f' DISTRIBUTE="{d.distribute.value}"' if d.distribute is not Distribution.UNSPECIFIED else ""
            lines.append(f'{indent}  <DIMENSION LOWER="{d.lower}" UPPER="{d.upper}"{dist} DIST_SKALAR="{d.dist_skalar}"/>')
        lines.append(f"{indent}</ARRAY>")


def _emit_device(dev: DeviceDecl, lines: list[str], indent: str) -> None:
    lines.append(f"{indent}<DEVICE DEVICE_ID={quoteattr(dev.device_id)}>")
    if dev.view is not None:
        _emit_view(dev.view, lines, indent + "  ")
    else:
        lines.append(f"{indent}  <NOVIEW/>")
    lines.append(f"{indent}</DEVICE>")


def _emit_view(v: ViewDecl, lines: list[str], indent: str) -> None:
    lines.append(f'{indent}<VIEW SKIP_HEADER="{v.skip_header}" SKIP="{v.skip}">')
    for b in v.blocks:
        lines.append(f'{indent}  <BLOCK OFFSET="{b.offset}" REPEAT="{b.repeat}" COUNT="{b.count}" STRIDE="{b.stride}">')
        if isinstance(b.child, ByteBlock):
            lines.append(f"{indent}    <BYTEBLOCK/>")
        else:
            _emit_view(b.child, lines, indent + "    ")
        lines.append(f"{indent}  </BLOCK>")
    lines.append(f"{indent}</VIEW>")
