"""Scalar fields on a group: radial composites, closures, grid samples.

Every field is callable on point arrays of shape (..., n).  RadialField
composes a profile h with the squared homogeneous norm and carries exact
first and second derivatives of h through jet arithmetic, so downstream
operators never need symbolic input.
"""

from __future__ import annotations

import json
import pathlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .dual import derivatives
from .groups import CarnotGroup

__all__ = [
    "RadialField",
    "CallableField",
    "ConstantField",
    "GridField",
    "MaxField",
    "PastedField",
    "grid_save",
    "grid_load",
]


class RadialField:
    """u(x) = h(r(x)^2) (or h(r(x))), with exact derivatives of h.

    ``h`` must be written in jet-friendly arithmetic (+, *, /, **, exp,
    log, sqrt) so value, first and second derivative come out together.
    """

    def __init__(self, group: CarnotGroup, h: Callable,
                 argument: str = "r_squared"):
        if argument not in ("r", "r_squared"):
            raise ValueError(f"argument must be 'r' or 'r_squared', got {argument!r}")
        self.group = group
        self.h = h
        self.argument = argument

    def _arg(self, x):
        r = self.group.hom_norm(x)
        return r if self.argument == "r" else r * r

    def __call__(self, x):
        t = self._arg(np.asarray(x, dtype=float))
        return derivatives(self.h, t)[0]

    def h_derivs(self, t):
        """(h, h', h'') at t."""
        return derivatives(self.h, np.asarray(t, dtype=float))

    def gradient(self, x):
        """Exact horizontal gradient components (..., m1) in the frame."""
        x = np.asarray(x, dtype=float)
        t = self._arg(x)
        _, d1, _ = derivatives(self.h, t)
        nsf = self.group.norm_sq_frame or self.group.norm_sq_frame_fd
        grad_r2 = nsf(x)
        if self.argument == "r":
            # chain through r = sqrt(r^2): X_j r = X_j(r^2)/(2r)
            r = self.group.hom_norm(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                grad_r2 = np.where(r[..., None] > 0,
                                   grad_r2 / (2.0 * r[..., None]), 0.0)
        return d1[..., None] * grad_r2


class CallableField:
    """Field from a plain closure, optionally with an exact frame gradient."""

    def __init__(self, fn: Callable, gradient: Optional[Callable] = None):
        self.fn = fn
        self._gradient = gradient

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def gradient(self, x):
        if self._gradient is None:
            raise ValueError("field has no exact gradient closure")
        return np.asarray(self._gradient(np.asarray(x, dtype=float)), dtype=float)


class ConstantField:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.value)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1] + (0,))


@dataclass(frozen=True)
class LatticeSpec:
    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    dims: tuple[int, ...]

    @property
    def axes(self):
        return [o + s * np.arange(d)
                for o, s, d in zip(self.origin, self.spacing, self.dims)]

    @property
    def upper(self):
        return tuple(o + s * (d - 1)
                     for o, s, d in zip(self.origin, self.spacing, self.dims))

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo = np.asarray(self.origin) + margin
        hi = np.asarray(self.upper) - margin
        return np.all((x >= lo) & (x <= hi), axis=-1)


class GridField:
    """Uniform ambient lattice of samples with multilinear interpolation."""

    def __init__(self, lattice: LatticeSpec, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.shape != tuple(lattice.dims):
            raise ValueError(
                f"values shape {values.shape} does not match lattice {lattice.dims}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        self.lattice = lattice
        self.values = values
        self._interp = RegularGridInterpolator(
            lattice.axes, values, method="linear", bounds_error=True)

    @classmethod
    def sample(cls, field, lattice: LatticeSpec) -> "GridField":
        mesh = np.stack(np.meshgrid(*lattice.axes, indexing="ij"), axis=-1)
        return cls(lattice, np.asarray(field(mesh), dtype=float))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self._interp(x)


class MaxField:
    """Pointwise maximum of two fields."""

    def __init__(self, u1, u2):
        self.u1 = u1
        self.u2 = u2

    def __call__(self, x):
        return np.maximum(self.u1(x), self.u2(x))


class PastedField:
    """max(u1, u2) on the region Omega, u2 outside it.

    ``omega`` is a boolean indicator callable on points.  The boundary
    hypothesis u2 >= u1 on the interface is checked on supplied samples
    at construction when ``interface_samples`` is given.
    """

    def __init__(self, u1, u2, omega: Callable,
                 interface_samples: Optional[np.ndarray] = None):
        if interface_samples is not None:
            pts = np.asarray(interface_samples, dtype=float)
            lo = np.asarray(u2(pts)) - np.asarray(u1(pts))
            bad = np.where(lo < -1e-10)[0]
            if bad.size:
                raise ValueError(
                    f"pasting hypothesis u2 >= u1 fails at interface sample "
                    f"{pts[bad[0]].tolist()} (gap {lo[bad[0]]:.3e})")
        self.u1 = u1
        self.u2 = u2
        self.omega = omega

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.asarray(self.omega(x), dtype=bool)
        v2 = np.asarray(self.u2(x), dtype=float)
        return np.where(inside, np.maximum(np.asarray(self.u1(x), float), v2), v2)


# ---------------------------------------------------------------------------
# grid I/O: flat binary or CSV payload plus a JSON sidecar


def grid_save(field: GridField, path, fmt: str = "npy") -> None:
    path = pathlib.Path(path)
    meta = {"origin": list(field.lattice.origin),
            "spacing": list(field.lattice.spacing),
            "dims": list(field.lattice.dims),
            "format": fmt}
    if fmt == "npy":
        np.save(path.with_suffix(".npy"), field.values)
    elif fmt == "csv":
        np.savetxt(path.with_suffix(".csv"), field.values.reshape(-1, 1),
                   fmt="%.17g")
    else:
        raise ValueError(f"unknown grid format {fmt!r}")
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2))


def grid_load(path) -> GridField:
    path = pathlib.Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    lattice = LatticeSpec(origin=tuple(meta["origin"]),
                          spacing=tuple(meta["spacing"]),
                          dims=tuple(meta["dims"]))
    if meta.get("format", "npy") == "npy":
        values = np.load(path.with_suffix(".npy"))
    else:
        values = np.loadtxt(path.with_suffix(".csv")).reshape(lattice.dims)
    return GridField(lattice, values)
