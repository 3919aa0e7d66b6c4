"""
On-disk formats.

BasisFile
    One JSON document. Floats are written with 17 significant digits so
    that every IEEE double round-trips exactly; one entry per line.
GridFile
    Comma-separated values with a header row: ``lon_deg, lat_deg, norm``
    followed by the real and imaginary part of each component.

Both are UTF-8 with LF line endings.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .cap_concentration import PolarCap, SpinSlepianEntry
from .field_assembly import (
    MIN_BANDLIMIT,
    RANKS,
    RankedEntry,
    RankedSlepianBasis,
    type_spins,
)

SCHEMA_VERSION = 1

COMPONENT_NAMES = {
    "spin": ["value"],
    "scalar": ["value"],
    "vector": ["x", "y", "z"],
    "tensor": [a + b for a in "xyz" for b in "xyz"],
}


class SchemaError(ValueError):
    """A BasisFile does not conform to the schema."""


def fmt_float(x):
    """Decimal text with 17 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _entry_line(e):
    coeffs = ", ".join(
        f'{{"n": {n}, "value": {fmt_float(c)}}}'
        for n, c in zip(e.slepian.degrees, e.slepian.coefficients))
    return (f'{{"alpha": {e.alpha}, "lambda": {fmt_float(e.lam)}, '
            f'"chi": {fmt_float(e.slepian.chi)}, "type_index": {e.type_index}, '
            f'"spin": {e.spin}, "j": {e.slepian.order}, "coeffs": [{coeffs}]}}')


def basis_to_text(basis):
    """Serialize a :class:`RankedSlepianBasis` to BasisFile text."""
    cap = basis.cap
    spin = basis.entries[0].spin if basis.rank == "spin" else None
    head = [
        "{",
        f'  "schema_version": {SCHEMA_VERSION},',
        f'  "rank": {json.dumps(basis.rank)},',
    ]
    if spin is not None:
        head.append(f'  "spin": {spin},')
    head += [
        f'  "L": {basis.bandlimit},',
        f'  "theta_deg": {fmt_float(cap.theta_deg)},',
        f'  "b": {fmt_float(cap.b)},',
        f'  "shannon": {fmt_float(basis.shannon)},',
        '  "entries": [',
    ]
    lines = [_entry_line(e) for e in basis.entries]
    body = ",\n".join("    " + line for line in lines)
    return "\n".join(head) + "\n" + body + "\n  ]\n}\n"


def write_basis(basis, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(basis_to_text(basis))


def _require(cond, message):
    if not cond:
        raise SchemaError(message)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x):
    return (_is_int(x) or isinstance(x, float)) and math.isfinite(x)


def basis_from_document(doc):
    """
    Rebuild a :class:`RankedSlepianBasis` from a parsed BasisFile.

    Raises
    ------
    SchemaError
        Naming the first field that violates the schema.
    """
    _require(isinstance(doc, dict), "top level must be an object")
    for key in ("schema_version", "rank", "L", "theta_deg", "b", "shannon", "entries"):
        _require(key in doc, f"missing field '{key}'")
    _require(doc["schema_version"] == SCHEMA_VERSION,
             f"unsupported schema_version {doc['schema_version']!r}")
    rank = doc["rank"]
    _require(rank in RANKS, f"field 'rank': unknown rank {rank!r}")
    L = doc["L"]
    _require(_is_int(L) and L >= MIN_BANDLIMIT[rank], f"field 'L': invalid bandlimit {L!r}")
    spin = doc.get("spin")
    if rank == "spin":
        _require(_is_int(spin) and abs(spin) <= L, f"field 'spin': invalid {spin!r}")
    theta = doc["theta_deg"]
    _require(_is_num(theta) and 0.0 < theta < 180.0, f"field 'theta_deg': {theta!r} not in (0, 180)")
    cap = PolarCap.from_degrees(float(theta))
    _require(_is_num(doc["b"]) and abs(doc["b"] - cap.b) <= 1e-15,
             "field 'b' inconsistent with theta_deg")
    _require(_is_num(doc["shannon"]), "field 'shannon' must be a number")

    spins = type_spins(rank, spin)
    entries_doc = doc["entries"]
    _require(isinstance(entries_doc, list), "field 'entries' must be an array")
    counters = {}
    entries = []
    for pos, e in enumerate(entries_doc, start=1):
        where = f"entries[{pos - 1}]"
        _require(isinstance(e, dict), f"{where} must be an object")
        for key in ("alpha", "lambda", "chi", "type_index", "spin", "j", "coeffs"):
            _require(key in e, f"{where}: missing field '{key}'")
        _require(e["alpha"] == pos, f"{where}: alpha {e['alpha']!r}, expected {pos}")
        _require(_is_num(e["lambda"]) and _is_num(e["chi"]),
                 f"{where}: 'lambda' and 'chi' must be finite numbers")
        ti = e["type_index"]
        _require(ti in spins, f"{where}: type_index {ti!r} invalid for rank {rank}")
        N = e["spin"]
        _require(N == spins[ti], f"{where}: spin {N!r} does not match type {ti}")
        j = e["j"]
        _require(_is_int(j) and abs(j) <= L, f"{where}: order j={j!r} out of range")
        n_min = max(abs(N), abs(j))
        coeffs = e["coeffs"]
        _require(isinstance(coeffs, list)
                 and [c.get("n") if isinstance(c, dict) else None for c in coeffs]
                 == list(range(n_min, L + 1)),
                 f"{where}: coeffs must cover n = {n_min}..{L} exactly")
        values = [c.get("value") for c in coeffs]
        _require(all(_is_num(v) for v in values), f"{where}: coefficient values must be finite numbers")
        source_index = counters.get(ti, 0)
        counters[ti] = source_index + 1
        slepian = SpinSlepianEntry(lam=float(e["lambda"]), chi=float(e["chi"]), order=j,
                                   n_min=n_min, coefficients=np.array(values, dtype=float))
        entries.append(RankedEntry(alpha=pos, lam=float(e["lambda"]), type_index=ti,
                                   spin=N, source_index=source_index, slepian=slepian))
    return RankedSlepianBasis(rank=rank, bandlimit=L, cap=cap, entries=tuple(entries),
                              shannon=float(doc["shannon"]))


def read_basis(path):
    """Parse a BasisFile; raises :class:`SchemaError` on malformed content."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return basis_from_document(doc)


def grid_header(rank):
    cols = ["lon_deg", "lat_deg", "norm"]
    for name in COMPONENT_NAMES[rank]:
        cols += [f"{name}_re", f"{name}_im"]
    return cols


def grid_to_text(rank, lat, lon, values, norms):
    """GridFile text from the arrays returned by ``eval_grid_arrays``."""
    lines = [",".join(grid_header(rank))]
    for i in range(len(lat)):
        row = [fmt_float(lon[i]), fmt_float(lat[i]), fmt_float(norms[i])]
        for z in values[i]:
            row += [fmt_float(z.real), fmt_float(z.imag)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_grid(rank, lat, lon, values, norms, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(grid_to_text(rank, lat, lon, values, norms))


def read_grid(path):
    """Return ``(header, rows)`` with rows as a float array."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, rows
