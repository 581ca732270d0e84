"""Force averaging over a discrete distribution of local separations.

A stand-in for a full roughness theory: the surface is described by
height offsets h_i with probabilities w_i, and the force is the weighted
mean of F(a + h_i).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from casimir.errors import InputError

MODEL_LABEL = "discrete-height-average (stand-in, not a full roughness theory)"


@dataclass(frozen=True)
class RoughnessProfile:
    entries: tuple  # ((height_offset_m, weight), ...)

    def __post_init__(self):
        entries = tuple((float(h), float(w)) for h, w in self.entries)
        if not entries:
            raise InputError("roughness profile is empty")
        if any(not w > 0 for _, w in entries):
            raise InputError("roughness weights must be > 0")
        total = math.fsum(w for _, w in entries)
        if abs(total - 1) > 1e-12:
            raise InputError(f"roughness weights sum to {total!r}, not 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def flat(cls):
        return cls(((0.0, 1.0),))

    @classmethod
    def from_csv(cls, path):
        """Read ``height_m,weight`` rows; a header line and ``#`` comments are skipped."""
        rows = []
        with Path(path).open(newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise InputError(f"{path}: bad roughness row {row}") from None
                    continue  # header
                except IndexError:
                    raise InputError(f"{path}: roughness rows need two columns") from None
        return cls(tuple(rows))

    @property
    def max_depth(self):
        return max(abs(h) for h, _ in self.entries)


def averaged_force(force_curve, profile: RoughnessProfile, a):
    """Weighted mean of ``force_curve(a + h)`` over the profile."""
    if not profile.max_depth < a:
        raise InputError(f"roughness offsets up to {profile.max_depth:g} m exceed a={a:g} m")
    return math.fsum(w * force_curve(a + h) for h, w in profile.entries)
