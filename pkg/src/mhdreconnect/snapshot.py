"""Binary field snapshots and CSV time-series emission.

Snapshot layout (all little-endian):

    bytes 0-7   magic "MHDSNAP1"
    u32         version (= 1)
    u32         n (samples per axis)
    f64         L (box side)
    f64         t (simulation time)
    f64         eta (diffusivity)
    u32         field count
    per field:  u16 name length, UTF-8 name, n^3 f64 samples x-fastest

Vector fields are stored as three scalars suffixed ".x", ".y", ".z".
Round trips are bitwise exact; writes are atomic (temp file then rename).
"""

from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import ScalarField, VectorField
from .grid import Grid

__all__ = ["SnapshotError", "Snapshot", "write_snapshot", "read_snapshot", "emit_timeseries"]

MAGIC = b"MHDSNAP1"
VERSION = 1

TIMESERIES_HEADER = (
    "t", "e0", "e1", "e2", "e3", "e0_low", "e0_high",
    "energy_total", "Linf_u", "Linf_b", "div_max",
)


class SnapshotError(ValueError):
    pass


def _atomic_write(path: Path, payload: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def _scalar_entries(name: str, field) -> list[tuple[str, np.ndarray]]:
    if isinstance(field, VectorField):
        phys = field.to_physical()
        return [(name + suffix, phys.data[i]) for i, suffix in enumerate((".x", ".y", ".z"))]
    phys = field.to_physical()
    return [(name, phys.data)]


def write_snapshot(obj, path, t: float | None = None, eta: float | None = None) -> None:
    """Persist a SolverState or a dict of named fields.

    Fields are written in physical representation.  For a SolverState the
    velocity and magnetic fields are stored under "u" and "b" and t/eta come
    from the state unless overridden.
    """
    from .solver import SolverState

    if isinstance(obj, SolverState):
        fields = {"u": obj.u, "b": obj.b}
        t = obj.t if t is None else t
        eta = obj.params.eta if eta is None else eta
    else:
        fields = dict(obj)
        t = 0.0 if t is None else t
        eta = 0.0 if eta is None else eta
    if not fields:
        raise SnapshotError("nothing to write: empty field mapping")

    grids = {id(f.grid): f.grid for f in fields.values()}
    if len({(g.n, g.L) for g in grids.values()}) != 1:
        raise SnapshotError("all snapshot fields must share one grid")
    grid = next(iter(grids.values()))

    entries: list[tuple[str, np.ndarray]] = []
    for name, f in fields.items():
        entries.extend(_scalar_entries(name, f))

    parts = [MAGIC, struct.pack("<II", VERSION, grid.n)]
    parts.append(struct.pack("<ddd", grid.L, float(t), float(eta)))
    parts.append(struct.pack("<I", len(entries)))
    for name, values in entries:
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(np.asarray(values, dtype="<f8").ravel(order="F").tobytes())
    _atomic_write(Path(path), b"".join(parts))


@dataclass
class Snapshot:
    grid: Grid
    t: float
    eta: float
    fields: dict[str, ScalarField]

    def vector(self, name: str) -> VectorField:
        """Reassemble a vector field stored as name.x / name.y / name.z."""
        try:
            comps = [self.fields[name + s] for s in (".x", ".y", ".z")]
        except KeyError:
            raise SnapshotError(f"snapshot holds no vector field named {name!r}") from None
        return VectorField.from_components(*comps)

    def field_names(self) -> list[str]:
        """Logical names: vector triplets collapse to their base name."""
        names = []
        for name in self.fields:
            base = name[:-2] if name.endswith((".x", ".y", ".z")) else name
            if base not in names:
                names.append(base)
        return names


def read_snapshot(path) -> Snapshot:
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 4:
        raise SnapshotError("truncated snapshot: missing header")
    if data[: len(MAGIC)] != MAGIC:
        raise SnapshotError("not a snapshot: bad magic bytes")
    offset = len(MAGIC)

    def take(fmt: str):
        nonlocal offset
        size = struct.calcsize(fmt)
        if offset + size > len(data):
            raise SnapshotError("truncated snapshot header")
        out = struct.unpack_from(fmt, data, offset)
        offset += size
        return out

    (version, n) = take("<II")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    (L, t, eta) = take("<ddd")
    (count,) = take("<I")
    grid = Grid(L, n)
    fields: dict[str, ScalarField] = {}
    block = n**3 * 8
    for _ in range(count):
        (name_len,) = take("<H")
        if offset + name_len > len(data):
            raise SnapshotError("truncated snapshot: field name")
        name = data[offset : offset + name_len].decode("utf-8")
        offset += name_len
        if offset + block > len(data):
            raise SnapshotError(f"truncated snapshot payload for field {name!r}")
        values = np.frombuffer(data[offset : offset + block], dtype="<f8")
        offset += block
        fields[name] = ScalarField(grid, values.reshape((n, n, n), order="F").copy())
    if offset != len(data):
        raise SnapshotError(f"{len(data) - offset} trailing bytes after payload")
    return Snapshot(grid=grid, t=t, eta=eta, fields=fields)


def emit_timeseries(rows, path) -> None:
    """Write observer rows as CSV with the canonical column order."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMESERIES_HEADER)
        for row in rows:
            writer.writerow([repr(float(row.get(col, 0.0))) for col in TIMESERIES_HEADER])
    os.replace(tmp, path)
