"""Measured force curves: loading, separation shifts, residuals, sweeps."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from casimir.dielectric import DrudeModel
from casimir.errors import CasimirError, InputError, NumericalError
from casimir.lifshitz import ForceJob, Layer, LayerStack
from casimir.units import force_exponent, length_exponent, scaled


def _frozen(x):
    x = np.array(x, dtype=float)
    x.flags.writeable = False
    return x


@dataclass(frozen=True)
class ExperimentDataset:
    """Force-distance points in SI units, sorted by separation."""

    a: np.ndarray
    force: np.ndarray
    sigma: np.ndarray | None = None
    shift_applied: float = 0.0
    label: str = ""
    # unshifted separations, so that shifts compose with a single rounding
    a_measured: np.ndarray | None = None

    def __post_init__(self):
        a, f = _frozen(self.a), _frozen(self.force)
        base = a - self.shift_applied if self.a_measured is None else self.a_measured
        object.__setattr__(self, "a_measured", _frozen(base))
        if a.ndim != 1 or a.shape != f.shape:
            raise InputError("dataset columns must be 1-D and of equal length")
        if a.size == 0:
            raise InputError("dataset has no points")
        if np.any(~(a > 0)):
            raise InputError(f"non-positive separations at rows {np.flatnonzero(~(a > 0)).tolist()}")
        bad = np.flatnonzero(np.diff(a) <= 0)
        if bad.size:
            raise InputError(f"separations not strictly increasing at rows {(bad + 1).tolist()}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "force", f)
        if self.sigma is not None:
            s = _frozen(self.sigma)
            if s.shape != a.shape:
                raise InputError("sigma column length mismatch")
            object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.a.size

    @property
    def points(self):
        sig = self.sigma if self.sigma is not None else [None] * len(self)
        return [(float(a), float(f), None if s is None else float(s))
                for a, f, s in zip(self.a, self.force, sig)]


def _parse_units(spec):
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != 2:
        raise InputError(f"units must look like 'nm,pN', got {spec!r}")
    return length_exponent(parts[0]), force_exponent(parts[1])


def load_force_dataset(path, units=None, label=None):
    """Read ``a,force[,sigma]`` rows.

    Units come from ``units`` (e.g. ``"nm,pN"``) or from a ``# units: nm,pN``
    comment in the file; one of the two is required.
    """
    path = Path(path)
    text = path.read_text()
    file_units = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s.lstrip("#").strip()
            if body.lower().startswith("units:"):
                file_units = body.split(":", 1)[1].strip()
            continue
        fields = next(csv.reader([s]))
        vals = [v.strip() for v in fields]
        try:
            for v in vals:
                float(v)
        except ValueError:
            if not rows:
                continue  # column header
            raise InputError(f"{path}:{lineno}: non-numeric row {s!r}") from None
        if len(vals) not in (2, 3):
            raise InputError(f"{path}:{lineno}: expected 2 or 3 columns")
        rows.append((lineno, vals))
    spec = units or file_units
    if spec is None:
        raise InputError(f"{path}: no units given (use '# units: nm,pN' or pass units)")
    la, fo = _parse_units(spec)
    if not rows:
        raise InputError(f"{path}: no data rows")
    if len({len(v) for _, v in rows}) != 1:
        raise InputError(f"{path}: mixed 2- and 3-column rows")
    a = np.array([scaled(v[0], la) for _, v in rows])
    order_bad = [rows[i + 1][0] for i in range(len(rows) - 1) if not a[i + 1] > a[i]]
    if order_bad:
        raise InputError(f"{path}: separations unsorted or duplicated at lines {order_bad}")
    force = np.array([scaled(v[1], fo) for _, v in rows])
    sigma = np.array([scaled(v[2], fo) for _, v in rows]) if len(rows[0][1]) == 3 else None
    return ExperimentDataset(a, force, sigma, 0.0, label if label is not None else path.stem)


def shift_separations(ds: ExperimentDataset, delta):
    """Move every point to a + delta; shifts accumulate in ``shift_applied``."""
    total = ds.shift_applied + delta
    return replace(ds, a=ds.a_measured + total, shift_applied=total)


@dataclass(frozen=True)
class ResidualTable:
    a: np.ndarray
    f_exp: np.ndarray
    f_model: np.ndarray
    residual: np.ndarray
    sigma: np.ndarray | None = None

    @property
    def rows(self):
        sig = self.sigma if self.sigma is not None else [None] * self.a.size
        return list(zip(self.a.tolist(), self.f_exp.tolist(), self.f_model.tolist(),
                        self.residual.tolist(), list(sig)))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["a_m", "f_exp_N", "f_model_N", "residual_N"]
        if self.sigma is not None:
            header.append("sigma_N")
        w.writerow(header)
        for i in range(self.a.size):
            row = [repr(float(self.a[i])), repr(float(self.f_exp[i])),
                   repr(float(self.f_model[i])), repr(float(self.residual[i]))]
            if self.sigma is not None:
                row.append(repr(float(self.sigma[i])))
            w.writerow(row)
        return buf.getvalue()


def _model_callable(model):
    if isinstance(model, ForceJob):
        return model.force
    if callable(model):
        return model
    raise InputError("model must be a ForceJob or a callable a -> force")


def residuals(ds: ExperimentDataset, model) -> ResidualTable:
    """F_exp - F_model at the dataset's (possibly shifted) separations."""
    f = _model_callable(model)
    values = []
    for a in ds.a:
        try:
            values.append(float(f(float(a))))
        except CasimirError as exc:
            kind = InputError if isinstance(exc, InputError) else NumericalError
            raise kind(f"model evaluation failed at a={a:.6g} m: {exc}") from exc
    f_model = np.array(values)
    return ResidualTable(ds.a, ds.force, f_model, ds.force - f_model, ds.sigma)


def synthetic_dataset(model, separations, offset=0.0, extra=None, sigma=None, label="synthetic"):
    """Fixture data: model force plus a constant offset and an optional extra term."""
    f = _model_callable(model)
    a = np.asarray(separations, dtype=float)
    force = np.array([f(float(x)) for x in a]) + offset
    if extra is not None:
        force = force + np.array([extra(float(x)) for x in a])
    sig = None if sigma is None else np.full(a.shape, float(sigma))
    return ExperimentDataset(a, force, sig, 0.0, label)


def yukawa_term(strength, length):
    """c exp(-a / lambda), a rapidly decaying extra attraction."""
    return lambda a: strength * math.exp(-a / length)


# -- sensitivity -----------------------------------------------------------

PARAMETERS = ("omega_p", "omega_tau", "rho_0", "thickness")


def perturb_stack(stack: LayerStack, parameter, delta):
    """Copy of ``stack`` with ``<layer>.<name>`` scaled by (1 + delta).

    ``omega_p`` is varied at fixed damping; ``rho_0`` is varied at fixed
    plasma frequency, which scales the damping by the same factor.
    """
    try:
        where, name = parameter.split(".")
    except ValueError:
        raise InputError(f"parameter must look like 'top.omega_p', got {parameter!r}") from None
    if where not in ("top", "substrate") or name not in PARAMETERS:
        raise InputError(f"unknown parameter {parameter!r}")
    layer = stack.top if where == "top" else stack.substrate
    if layer is None:
        raise InputError(f"stack has no {where} layer")
    f = 1 + delta
    if name == "thickness":
        if where != "top":
            raise InputError("only the top layer has a thickness")
        new = Layer(layer.model, layer.thickness * f)
    else:
        if not isinstance(layer.model, DrudeModel):
            raise InputError(f"{parameter} needs a Drude layer")
        p = layer.model.params
        scaled = p.scaled(omega_p=f) if name == "omega_p" else p.scaled(omega_tau=f)
        new = Layer(DrudeModel(scaled), layer.thickness)
    if where == "top":
        return LayerStack(stack.substrate, new)
    return LayerStack(new, stack.top)


def sensitivity_sweep(base_job: ForceJob, parameter, deltas, separations):
    """``[(delta, dF)]`` with dF[i] = F_perturbed(a_i) - F_base(a_i)."""
    a = [float(x) for x in separations]
    # resolve the parameter before spending time on the base curve
    for d in deltas:
        perturb_stack(base_job.stack, parameter, d)
    base = np.array([base_job.force(x) for x in a])
    out = []
    for d in deltas:
        if d == 0:
            out.append((d, np.zeros_like(base)))
            continue
        job = base_job.with_stack(perturb_stack(base_job.stack, parameter, d))
        out.append((d, np.array([job.force(x) for x in a]) - base))
    return out
