"""Evaluation of recursive view selection patterns.

A view describes which bytes of a logical region land on one device.  The
pattern is periodic: within each period, every block first skips
``offset`` bytes, then lays down ``repeat`` takes of ``count`` units with
``stride``-byte gaps between consecutive takes (none after the last), and
the view appends ``skip`` trailing bytes.  ``skip_header`` is consumed
exactly once, before the first period.  A take's unit is one byte under a
BYTEBLOCK leaf; under a nested view it is one full inner period, and the
inner pattern is applied within the take's span (inner header consumed
once per take).  The pattern tiles until the region is exhausted; takes
straddling the region end are clipped, never dropped.

Two independent evaluators are kept deliberately separate so they can
check each other: ``enumerate_extents`` walks a streaming cursor, while
``member_oracle`` answers per-byte membership purely arithmetically
(modulo the period, then span subtraction and division).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ArithmeticOverflow, NoDevices
from .model import BlockDecl, ByteBlock, Document, ViewDecl

__all__ = [
    "INT64_MAX",
    "Extent",
    "MapEntry",
    "DistributionMap",
    "PartitionStatus",
    "PartitionVerdict",
    "view_period",
    "selected_bytes_per_period",
    "enumerate_extents",
    "member_oracle",
    "build_distribution_map",
    "check_partition",
    "render_plan",
    "view_selecting",
]

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Extent:
    """Half-open byte range [start, start+length) of the logical file."""

    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length

    def __str__(self) -> str:
        return f"{self.start}:{self.length}"


@dataclass(frozen=True)
class MapEntry:
    island: str
    host: str
    device_id: str
    extents: tuple[Extent, ...]

    @property
    def label(self) -> str:
        return f"{self.island}/{self.host}/{self.device_id}"

    @property
    def total_bytes(self) -> int:
        return sum(e.length for e in self.extents)


@dataclass(frozen=True)
class DistributionMap:
    """Per-device extent lists for one file size, in document order."""

    file_size: int
    entries: tuple[MapEntry, ...]


class PartitionStatus(enum.Enum):
    EXACT_PARTITION = "exact"
    HAS_GAPS = "gaps"
    HAS_OVERLAPS = "overlaps"
    GAPS_AND_OVERLAPS = "gaps+overlaps"


@dataclass(frozen=True)
class PartitionVerdict:
    status: PartitionStatus
    gaps: tuple[Extent, ...] = ()
    overlaps: tuple[tuple[Extent, tuple[str, ...]], ...] = ()


def _guard(value: int, what: str) -> int:
    if value > INT64_MAX:
        raise ArithmeticOverflow(f"{what} exceeds the 64-bit range: {value}")
    return value


def view_period(view: ViewDecl) -> int:
    """Bytes one pattern instance spans before it repeats.

    Closed form: sum over blocks of offset + repeat*count*unit +
    (repeat-1)*stride, plus the trailing skip.  The one-time skip_header
    is not part of the period.
    """
    # views are frozen, so the period is memoized on the instance
    cached = view.__dict__.get("_period")
    if cached is not None:
        return cached
    total = view.skip
    for b in view.blocks:
        unit = 1 if isinstance(b.child, ByteBlock) else view_period(b.child)
        total += b.offset + b.repeat * b.count * unit + (b.repeat - 1) * b.stride
    _guard(total, "view period")
    view.__dict__["_period"] = total
    return total


def _walk_one_period(view: ViewDecl) -> tuple[int, list[tuple[int, int]]]:
    """Cursor-walk a single period; pieces are (start, length) relative
    to the period origin, sorted and disjoint."""
    pieces: list[tuple[int, int]] = []
    cursor = 0
    for b in view.blocks:
        cursor += b.offset
        if isinstance(b.child, ByteBlock):
            take = b.count
            inner = None
        else:
            take = b.count * _walk_one_period(b.child)[0]
            inner = enumerate_extents(b.child, take)  # same selection in every take
        for r in range(b.repeat):
            if inner is None:
                pieces.append((cursor, take))
            else:
                pieces.extend((cursor + e.start, e.length) for e in inner)
            cursor += take
            if r + 1 < b.repeat:
                cursor += b.stride
        _guard(cursor, "view cursor")
    cursor += view.skip
    return _guard(cursor, "view period"), pieces


def _merge(pieces: list[tuple[int, int]]) -> tuple[Extent, ...]:
    merged: list[list[int]] = []
    for start, length in pieces:
        if length <= 0:
            continue
        if merged and merged[-1][1] == start:
            merged[-1][1] = start + length
        else:
            merged.append([start, start + length])
    return tuple(Extent(s, e - s) for s, e in merged)


def enumerate_extents(view: ViewDecl, region_size: int) -> tuple[Extent, ...]:
    """Selected extents of [0, region_size), merged, sorted and disjoint."""
    if region_size <= 0:
        return ()
    period, pieces = _walk_one_period(view)
    if period < 1:  # block-less views select nothing
        return ()
    out: list[tuple[int, int]] = []
    base = view.skip_header
    while base < region_size:
        for start, length in pieces:
            abs_start = base + start
            if abs_start >= region_size:
                break
            out.append((abs_start, min(abs_start + length, region_size) - abs_start))
        base += period
    return _merge(out)


def _member_plan(view: ViewDecl) -> tuple[int, tuple[tuple[int, int, int, int, ViewDecl | None], ...]]:
    """Per-block constants for the membership arithmetic, memoized on the
    (frozen) view: (offset, take, take+stride, span, nested view or None)."""
    cached = view.__dict__.get("_member_plan")
    if cached is not None:
        return cached
    rows = []
    for b in view.blocks:
        unit = 1 if isinstance(b.child, ByteBlock) else view_period(b.child)
        take = b.count * unit
        span = b.offset + b.repeat * take + (b.repeat - 1) * b.stride
        nested = b.child if isinstance(b.child, ViewDecl) else None
        rows.append((b.offset, take, take + b.stride, span, nested))
    plan = (view_period(view), tuple(rows))
    view.__dict__["_member_plan"] = plan
    return plan


def member_oracle(view: ViewDecl, byte_index: int) -> bool:
    """Arithmetic membership test: does the view select this byte?

    Equivalent to membership in enumerate_extents over an unbounded
    region, but computed by modular reduction and span subtraction with
    no cursor walk, so the two implementations can cross-check.
    """
    if byte_index < view.skip_header:
        return False
    period, rows = _member_plan(view)
    if period < 1:  # block-less views select nothing
        return False
    r = (byte_index - view.skip_header) % period
    for offset, take, step, span, nested in rows:
        if r < span:
            if r < offset:
                return False
            inside = (r - offset) % step
            if inside >= take:
                return False  # stride gap
            if nested is None:
                return True
            return member_oracle(nested, inside)
        r -= span
    return False  # trailing skip


def selected_bytes_per_period(view: ViewDecl) -> int:
    """Bytes one full period places on the device (header excluded)."""
    region = view.skip_header + view_period(view)
    skipped = view.skip_header
    return sum(e.length for e in enumerate_extents(view, region) if e.start >= skipped)


def build_distribution_map(doc: Document, file_size: int) -> DistributionMap:
    """Evaluate every device's view against a file of the given size.

    Devices marked NOVIEW receive nothing, unless every device in the
    document is NOVIEW; then the first device of the first server takes
    the whole file sequentially.
    """
    if file_size < 0:
        raise ValueError(f"file_size must be >= 0, got {file_size}")
    devices = [
        (doc.island.name, srv.host, dev)
        for srv in doc.island.servers
        for dev in srv.devices
    ]
    if not devices:
        raise NoDevices(f"island {doc.island.name!r} declares no device to place bytes on")
    all_noview = all(dev.view is None for _, _, dev in devices)
    entries = []
    for i, (island, host, dev) in enumerate(devices):
        if dev.view is not None:
            extents = enumerate_extents(dev.view, file_size)
        elif all_noview and i == 0 and file_size > 0:
            extents = (Extent(0, file_size),)
        else:
            extents = ()
        entries.append(MapEntry(island, host, dev.device_id, extents))
    return DistributionMap(file_size=file_size, entries=tuple(entries))


def check_partition(dmap: DistributionMap) -> PartitionVerdict:
    """Classify coverage of [0, file_size) by the map's extents.

    Exact means every byte is claimed exactly once.  Gaps and overlaps
    are reported as maximal extents; overlap runs split where the
    claimant set changes so each reported extent lists its exact owners.
    """
    size = dmap.file_size
    if size == 0:
        return PartitionVerdict(PartitionStatus.EXACT_PARTITION)
    deltas: dict[int, list[tuple[int, str]]] = {}
    for entry in dmap.entries:
        for ext in entry.extents:
            lo = max(0, ext.start)
            hi = min(size, ext.end)
            if hi > lo:
                deltas.setdefault(lo, []).append((1, entry.label))
                deltas.setdefault(hi, []).append((-1, entry.label))
    cuts = sorted(set(deltas) | {0, size})
    active: dict[str, int] = {}
    gaps: list[list[int]] = []
    overlaps: list[tuple[int, int, tuple[str, ...]]] = []
    for pos, nxt in zip(cuts, cuts[1:]):
        for delta, label in deltas.get(pos, ()):
            active[label] = active.get(label, 0) + delta
            if active[label] == 0:
                del active[label]
        if pos >= size:
            break
        coverage = sum(active.values())
        if coverage == 0:
            if gaps and gaps[-1][1] == pos:
                gaps[-1][1] = nxt
            else:
                gaps.append([pos, nxt])
        elif coverage >= 2:
            claimants = tuple(sorted(active))
            if overlaps and overlaps[-1][1] == pos and overlaps[-1][2] == claimants:
                overlaps[-1] = (overlaps[-1][0], nxt, claimants)
            else:
                overlaps.append((pos, nxt, claimants))
    gap_extents = tuple(Extent(lo, hi - lo) for lo, hi in gaps)
    overlap_extents = tuple((Extent(lo, hi - lo), who) for lo, hi, who in overlaps)
    if gap_extents and overlap_extents:
        status = PartitionStatus.GAPS_AND_OVERLAPS
    elif gap_extents:
        status = PartitionStatus.HAS_GAPS
    elif overlap_extents:
        status = PartitionStatus.HAS_OVERLAPS
    else:
        status = PartitionStatus.EXACT_PARTITION
    return PartitionVerdict(status, gap_extents, overlap_extents)


def render_plan(dmap: DistributionMap, verdict: PartitionVerdict | None = None) -> str:
    """Plan text: one tab-separated line per device plus a verdict line."""
    if verdict is None:
        verdict = check_partition(dmap)
    lines = [
        f"{entry.label}\t" + ",".join(str(e) for e in entry.extents)
        for entry in dmap.entries
    ]
    lines.append(f"partition: {verdict.status.value}")
    return "\n".join(lines) + "\n"


def view_selecting(extents: tuple[Extent, ...] | list[Extent], region_size: int) -> ViewDecl:
    """Build a single-period view whose selection over region_size equals
    the given extents (sorted, disjoint, within the region).

    An empty selection is encoded as a take placed past the region end,
    which clips to nothing.
    """
    cursor = 0
    for ext in extents:
        if ext.start < cursor or ext.length < 1 or ext.end > region_size:
            raise ValueError(f"extents must be sorted, disjoint and within [0, {region_size}): {ext}")
        cursor = ext.end
    if not extents:
        return ViewDecl(0, 0, (BlockDecl(region_size, 1, 1, 0, ByteBlock()),))
    blocks = []
    cursor = 0
    for ext in extents:
        blocks.append(BlockDecl(ext.start - cursor, 1, ext.length, 0, ByteBlock()))
        cursor = ext.end
    return ViewDecl(0, region_size - cursor, tuple(blocks))
