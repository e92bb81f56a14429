"""Byte-stable CSV and JSON tables of Weyl records."""
import csv
import io
import json
from typing import Iterable, List, Mapping, Sequence

from .conventions import SCHEMA, ledger_hash
from .errors import ConventionMismatchError
from .weyl import WeylRecord

BASE_COLUMNS = ["constant", "exponent", "volume_convention", "provenance"]


def fmt_float(v) -> str:
    return format(float(v), ".12g")


def _round(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, float):
        return float(fmt_float(v))
    if isinstance(v, complex):
        return {"re": float(fmt_float(v.real)), "im": float(fmt_float(v.imag))}
    if isinstance(v, Mapping):
        return {str(k): _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    if hasattr(v, "item"):
        return _round(v.item())
    return v


def _cell(v) -> str:
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, complex):
        return f"{fmt_float(v.real)}{'+' if v.imag >= 0 else '-'}{fmt_float(abs(v.imag))}j"
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def _check_homogeneous(records: Sequence[WeylRecord]) -> List[str]:
    if not records:
        return []
    keys = list(records[0].params)
    first = records[0]
    for r in records[1:]:
        if r.volume_convention != first.volume_convention or r.provenance != first.provenance:
            raise ConventionMismatchError(
                f"records mix conventions: {first.volume_convention}/{first.provenance} "
                f"vs {r.volume_convention}/{r.provenance}"
            )
        if list(r.params) != keys:
            raise ConventionMismatchError(f"records have different parameters: {keys} vs {list(r.params)}")
    return keys


def emit_table(records: Iterable[WeylRecord], fmt: str = "csv",
               excluded: Iterable[Mapping] = (), param_names: Sequence[str] = ()) -> bytes:
    """Serialise records as CSV or JSON.

    ``excluded`` lists parameter sets for which no constant exists; they are
    appended with status ``excluded``. ``param_names`` fixes the parameter
    columns when ``records`` is empty.
    """
    records = list(records)
    excluded = [dict(e) for e in excluded]
    keys = _check_homogeneous(records) or list(param_names) or (list(excluded[0]) if excluded else [])
    h = ledger_hash()
    if fmt == "json":
        rows = []
        for r in records:
            rows.append({"params": _round(dict(r.params)), "constant": _round(r.constant),
                         "exponent": _round(r.exponent), "volume_convention": r.volume_convention,
                         "provenance": list(r.provenance), "alternatives": _round(dict(r.alternatives)),
                         "status": "ok"})
        for e in excluded:
            rows.append({"params": _round(e), "status": "excluded"})
        doc = {"schema": SCHEMA, "ledger_hash": h, "records": rows}
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = keys + BASE_COLUMNS + (["status"] if excluded else []) + ["ledger_hash"]
    w.writerow(header)
    rows = []
    for r in records:
        row = [_cell(r.params[k]) for k in keys]
        row += [fmt_float(r.constant), fmt_float(r.exponent), r.volume_convention, "; ".join(r.provenance)]
        rows.append(([r.params[k] for k in keys], row + (["ok"] if excluded else []) + [h]))
    for e in excluded:
        rows.append(([e.get(k) for k in keys], [_cell(e.get(k, "")) for k in keys] + ["", "", "", "", "excluded", h]))
    if excluded:
        rows.sort(key=lambda kr: kr[0])
    w.writerows(row for _, row in rows)
    return buf.getvalue().encode("utf-8")


def emit_json(payload: Mapping) -> bytes:
    """A versioned JSON document for non-tabular results."""
    doc = {"schema": SCHEMA, "ledger_hash": ledger_hash()}
    doc.update(_round(dict(payload)))
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
