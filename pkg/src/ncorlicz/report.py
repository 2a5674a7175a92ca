"""Verification reports and their JSON / CSV serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SAMPLE_FIELDS = ("index", "variant", "lhs", "rhs", "ratio")


@dataclass
class VerificationReport:
    inequality: str
    regime: dict
    samples: list
    aggregate: dict
    passed: bool | None
    findings: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "regime": self.regime,
            "samples": self.samples,
            "aggregate": self.aggregate,
            "pass": self.passed,
            "findings": self.findings,
            "config": self.config,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["inequality"], d["regime"], d["samples"], d["aggregate"], d["pass"],
                   d.get("findings", []), d.get("config", {}), d.get("error"))


def summarize(samples: list) -> dict:
    """min / median / max of the ratios, overall and per variant."""
    def stats(rows):
        r = [row["ratio"] for row in rows]
        if not r:
            return {"count": 0, "min": None, "median": None, "max": None}
        return {"count": len(r), "min": min(r), "median": float(np.median(r)), "max": max(r)}

    out = stats(samples)
    variants = sorted({row.get("variant", "") for row in samples})
    if len(variants) > 1:
        out["by_variant"] = {v: stats([row for row in samples if row.get("variant", "") == v]) for v in variants}
    return out


def evaluate_pass(samples: list, aggregate: dict) -> bool | None:
    """The pass flag as a function of per-sample ratios and the stored bounds.

    ``aggregate["mode"]`` is ``"finding"`` (nothing asserted, returns None),
    ``"certified"`` or ``"asserted"``; the latter two check every ratio against
    ``upper_bound`` and, when present, ``lower_bound``.  With per-variant bounds
    (``bounds``: variant -> [lower, upper]) each row uses its variant's bounds.
    """
    if aggregate.get("mode") == "finding":
        return None
    per_variant = aggregate.get("bounds")
    for row in samples:
        if per_variant:
            lo, hi = per_variant[row.get("variant", "")]
        else:
            lo, hi = aggregate.get("lower_bound"), aggregate.get("upper_bound")
        r = row["ratio"]
        if hi is not None and not r <= hi:
            return False
        if lo is not None and not r >= lo:
            return False
    return True


# serialization


def _encode(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            out.append("NaN")
        elif math.isinf(v):
            out.append("Infinity" if v > 0 else "-Infinity")
        else:
            out.append(format(v, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits and insertion-ordered keys."""
    out = []
    _encode(obj, out)
    return "".join(out)


def reports_to_json(reports) -> str:
    return dumps([r.to_dict() for r in reports]) + "\n"


def reports_from_json(text: str) -> list:
    return [VerificationReport.from_dict(d) for d in json.loads(text)]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("inequality",) + SAMPLE_FIELDS)
    for r in reports:
        for row in r.samples:
            w.writerow([r.inequality] + [
                format(float(row[k]), ".17g") if isinstance(row.get(k), float) else row.get(k, "")
                for k in SAMPLE_FIELDS
            ])
    return buf.getvalue()


def emit_report(reports, fmt: str = "json", path=None) -> str:
    """Serialize ``reports``; write to ``path`` if given and return the text."""
    if fmt == "json":
        text = reports_to_json(reports)
    elif fmt == "csv":
        text = reports_to_csv(reports)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
