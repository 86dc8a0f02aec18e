"""CdfCurve: the exchange format for every analytic or empirical curve.

Curves serialize to CSV with a commented header block (lines prefixed '#')
carrying JSON-encoded provenance metadata, one curve per file.  Reading a
file written by to_csv reproduces the curve bit-identically (values are
written with repr precision).
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError

_MAGIC = "fasim-csv v1"


@dataclass
class CdfCurve:
    """A threshold grid with cdf values and optional binomial CI bounds.

    ci_low/ci_high, when present, are the 95% interval (value -/+ 1.96
    standard errors, clipped to [0, 1]).
    """

    label: str
    s_th: np.ndarray
    value: np.ndarray
    ci_low: Optional[np.ndarray] = None
    ci_high: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s_th = np.asarray(self.s_th, float)
        self.value = np.asarray(self.value, float)
        if self.s_th.shape != self.value.shape or self.s_th.ndim != 1:
            raise DomainError("s_th and value must be 1-d arrays of equal length")
        if np.any(np.diff(self.s_th) <= 0):
            raise DomainError("thresholds must be strictly increasing")
        if np.any((self.value < -1e-12) | (self.value > 1 + 1e-12)):
            raise DomainError("curve values must lie in [0, 1]")
        for name in ("ci_low", "ci_high"):
            ci = getattr(self, name)
            if ci is not None:
                setattr(self, name, np.asarray(ci, float))
        if (self.ci_low is None) != (self.ci_high is None):
            raise DomainError("ci_low and ci_high must be given together")
        if self.ci_low is not None:
            if np.any(self.ci_low > self.value + 1e-12) or \
               np.any(self.ci_high < self.value - 1e-12):
                raise DomainError("CI bounds must bracket the value")

    @property
    def has_ci(self):
        return self.ci_low is not None

    def to_csv(self, path):
        meta = dict(self.metadata)
        meta["label"] = self.label
        with open(path, "w") as fh:
            fh.write(f"# {_MAGIC}\n")
            fh.write(f"# {json.dumps(meta, sort_keys=True)}\n")
            cols = ["s_th", "value"] + (["ci_low", "ci_high"] if self.has_ci else [])
            fh.write(",".join(cols) + "\n")
            for i in range(self.s_th.size):
                row = [repr(float(self.s_th[i])), repr(float(self.value[i]))]
                if self.has_ci:
                    row += [repr(float(self.ci_low[i])),
                            repr(float(self.ci_high[i]))]
                fh.write(",".join(row) + "\n")

    @classmethod
    def from_csv(cls, path):
        meta, columns = read_table(path)
        label = meta.pop("label", "")
        return cls(
            label=label,
            s_th=columns["s_th"],
            value=columns["value"],
            ci_low=columns.get("ci_low"),
            ci_high=columns.get("ci_high"),
            metadata=meta,
        )


def write_table(path, metadata, columns):
    """Write a generic named-column table with the same metadata header."""
    names = list(columns)
    arrays = [np.asarray(columns[n], float) for n in names]
    n_rows = arrays[0].size
    if any(a.size != n_rows for a in arrays):
        raise DomainError("all table columns must have equal length")
    with open(path, "w") as fh:
        fh.write(f"# {_MAGIC}\n")
        fh.write(f"# {json.dumps(metadata, sort_keys=True)}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            fh.write(",".join(repr(float(a[i])) for a in arrays) + "\n")


def read_table(path):
    """Read (metadata, columns) from a curve/table CSV."""
    meta_lines = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("#"):
            meta_lines.append(line[1:].strip())
        else:
            body_start = i
            break
    if not meta_lines or meta_lines[0] != _MAGIC:
        raise DomainError(f"{path} is not a fasim CSV (missing magic header)")
    metadata = json.loads(meta_lines[1]) if len(meta_lines) > 1 else {}
    header = lines[body_start].split(",")
    rows = [line.split(",") for line in lines[body_start + 1:] if line]
    columns = {
        name: np.array([float(r[j]) for r in rows])
        for j, name in enumerate(header)
    }
    return metadata, columns


def config_hash(metadata):
    """Stable short hash of a metadata dict, for provenance fields."""
    blob = json.dumps(metadata, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
