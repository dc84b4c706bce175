"""Splitting file bytes into per-device fragments and reassembling them.

A fragment is the concatenation, in ascending logical offset, of the
bytes a device owns under a distribution map.  Scatter and gather both
insist on an exact partition: only then is every byte placed exactly
once and the round trip an identity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ExtraFragment, LengthMismatch, MissingFragment, NotAPartition, SizeMismatch
from .views import DistributionMap, PartitionStatus, check_partition

__all__ = ["Fragment", "scatter", "gather"]

DeviceRef = tuple[str, str, str]  # (island, host, device_id)


@dataclass(frozen=True)
class Fragment:
    device_ref: DeviceRef
    payload: bytes


def _require_exact(dmap: DistributionMap) -> None:
    verdict = check_partition(dmap)
    if verdict.status is not PartitionStatus.EXACT_PARTITION:
        raise NotAPartition(verdict)


def scatter(data: bytes, dmap: DistributionMap) -> list[Fragment]:
    """One fragment per map entry; empty payloads are materialized."""
    if len(data) != dmap.file_size:
        raise SizeMismatch(f"data is {len(data)} bytes but the map addresses {dmap.file_size}")
    _require_exact(dmap)
    data = bytes(data)
    return [
        Fragment(
            device_ref=(entry.island, entry.host, entry.device_id),
            payload=b"".join(data[e.start : e.end] for e in entry.extents),
        )
        for entry in dmap.entries
    ]


def gather(fragments: list[Fragment], dmap: DistributionMap) -> bytes:
    """Rebuild the logical file; inverse of scatter for exact partitions.

    Fragments are matched to map entries by device reference (in order,
    should a reference repeat).  Every entry must be matched exactly once.
    """
    _require_exact(dmap)
    pool: dict[DeviceRef, deque[Fragment]] = {}
    for frag in fragments:
        pool.setdefault(frag.device_ref, deque()).append(frag)
    out = bytearray(dmap.file_size)
    for entry in dmap.entries:
        ref = (entry.island, entry.host, entry.device_id)
        queue = pool.get(ref)
        if not queue:
            raise MissingFragment(f"no fragment for device {entry.label}")
        frag = queue.popleft()
        expected = entry.total_bytes
        if len(frag.payload) != expected:
            raise LengthMismatch(
                f"fragment for {entry.label} has {len(frag.payload)} bytes, extents total {expected}"
            )
        pos = 0
        for ext in entry.extents:
            out[ext.start : ext.end] = frag.payload[pos : pos + ext.length]
            pos += ext.length
    leftover = [ref for ref, queue in pool.items() if queue]
    if leftover:
        raise ExtraFragment(f"fragments match no map entry: {leftover}")
    return bytes(out)
