"""Homogeneous Carnot groups as concrete coordinate groups on R^n.

A group is described by its layered coordinate decomposition, a polynomial
group law, anisotropic dilations and a homogeneous norm rescaled so that
the horizontal gradient of the norm stays <= 1.  Points are plain numpy
arrays of shape (..., n); every operation broadcasts over leading axes.

Shipped groups: Euclidean R^Q and the Heisenberg groups H^m.  For H^m the
coordinates are (x_1..x_m, y_1..y_m, t), the group law adds t-components as
t + t' + 2*sum(y_j x'_j - x_j y'_j), and the horizontal frame is

    X_j = d/dx_j + 2 y_j d/dt,      Y_j = d/dy_j - 2 x_j d/dt,

which is left-invariant for that law and satisfies [X_j, Y_j] = -4 d/dt.
The homogeneous norm is the quartic norm (|z|^4 + t^2)^(1/4).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "CarnotGroup",
    "make_euclidean",
    "make_heisenberg",
    "make_custom",
    "compose",
    "inverse",
    "dilate",
    "frame_vector",
    "ball_volume_estimate",
    "VolumeEstimate",
    "group_to_json",
    "group_from_json",
    "selfcheck",
]


@dataclass(frozen=True)
class CarnotGroup:
    """Immutable descriptor of a homogeneous Carnot group.

    All callables are pure and vectorized over leading axes; the value is
    safe to share between parallel workers.
    """

    kind: str
    layer_dims: tuple[int, ...]
    group_law: Callable[[np.ndarray, np.ndarray], np.ndarray]
    inverse_law: Callable[[np.ndarray], np.ndarray]
    hom_norm: Callable[[np.ndarray], np.ndarray]
    frame_coeffs: Callable[[np.ndarray], np.ndarray]  # (..., m1, n)
    # X_j applied to r^2, closed form, shape (..., m1); None -> finite differences
    norm_sq_frame: Optional[Callable[[np.ndarray], np.ndarray]] = None
    # half-widths of a box containing the unit ball {r < 1}, length n
    unit_box: tuple[float, ...] = ()
    params: dict = field(default_factory=dict)

    @property
    def step(self) -> int:
        return len(self.layer_dims)

    @property
    def topological_dim(self) -> int:
        return int(sum(self.layer_dims))

    @property
    def homogeneous_dim(self) -> int:
        return int(sum((j + 1) * m for j, m in enumerate(self.layer_dims)))

    @property
    def horizontal_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def layer_weights(self) -> np.ndarray:
        """Dilation exponent of each coordinate, length n."""
        return np.repeat(np.arange(1, self.step + 1),
                         np.asarray(self.layer_dims))

    def origin(self) -> np.ndarray:
        return np.zeros(self.topological_dim)

    def dilation(self, R: float, x: np.ndarray) -> np.ndarray:
        if R <= 0:
            raise ValueError(f"dilation scale must be positive, got {R}")
        x = np.asarray(x, dtype=float)
        return x * np.power(float(R), self.layer_weights)

    def norm_sq_frame_fd(self, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
        """X_j(r^2) by central differences along horizontal flows."""
        x = np.asarray(x, dtype=float)
        m1, n = self.horizontal_dim, self.topological_dim
        out = np.empty(x.shape[:-1] + (m1,))
        for j in range(m1):
            e = np.zeros(n)
            e[j] = step
            fwd = self.hom_norm(self.group_law(x, e)) ** 2
            bwd = self.hom_norm(self.group_law(x, -e)) ** 2
            out[..., j] = (fwd - bwd) / (2.0 * step)
        return out

    def ball_bbox(self, center: np.ndarray, rho: float) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate bounding box of the ball {x : r(center^-1 o x) < rho}."""
        center = np.asarray(center, dtype=float)
        half = np.asarray(self.unit_box) * np.power(rho, self.layer_weights)
        if self.kind == "euclidean":
            return center - half, center + half
        # left translate of the centered box: scan composed corners of a
        # coarse grid; polynomial group laws attain extremes near corners
        axes = [np.linspace(-h, h, 5) for h in half]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(half))
        moved = self.group_law(center, grid)
        lo = moved.min(axis=0)
        hi = moved.max(axis=0)
        pad = 0.05 * (hi - lo)
        return lo - pad, hi + pad


def _check_point(g: CarnotGroup, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != g.topological_dim:
        raise ValueError(
            f"point has dimension {x.shape[-1]}, group expects {g.topological_dim}")
    return x


# ---------------------------------------------------------------------------
# constructors


def make_euclidean(Q: int) -> CarnotGroup:
    """Abelian group (R^Q, +) with the Euclidean norm."""
    if Q < 1:
        raise ValueError(f"Euclidean dimension must be >= 1, got {Q}")
    eye = np.eye(Q)

    def frame(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(eye, x.shape[:-1] + (Q, Q))

    return CarnotGroup(
        kind="euclidean",
        layer_dims=(Q,),
        group_law=lambda x, y: np.asarray(x, float) + np.asarray(y, float),
        inverse_law=lambda x: -np.asarray(x, float),
        hom_norm=lambda x: np.linalg.norm(np.asarray(x, float), axis=-1),
        frame_coeffs=frame,
        norm_sq_frame=lambda x: 2.0 * np.asarray(x, float),
        unit_box=(1.0,) * Q,
        params={"Q": Q},
    )


def make_heisenberg(m: int) -> CarnotGroup:
    """Heisenberg group H^m, coordinates (x_1..x_m, y_1..y_m, t)."""
    if m < 1:
        raise ValueError(f"Heisenberg index must be >= 1, got {m}")
    n = 2 * m + 1

    def law(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        a, b = np.broadcast_arrays(a, b)
        out = a + b
        twist = np.sum(a[..., m:2 * m] * b[..., :m]
                       - a[..., :m] * b[..., m:2 * m], axis=-1)
        out = out.copy()
        out[..., 2 * m] += 2.0 * twist
        return out

    def norm(x):
        x = np.asarray(x, dtype=float)
        z2 = np.sum(x[..., :2 * m] ** 2, axis=-1)
        return (z2 ** 2 + x[..., 2 * m] ** 2) ** 0.25

    def frame(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (2 * m, n))
        idx = np.arange(m)
        out[..., idx, idx] = 1.0
        out[..., idx, 2 * m] = 2.0 * x[..., m:2 * m]
        out[..., m + idx, m + idx] = 1.0
        out[..., m + idx, 2 * m] = -2.0 * x[..., :m]
        return out

    def nsf(x):
        # X_j(r^2) = (2 x_j |z|^2 + 2 y_j t)/r^2,  Y_j(r^2) = (2 y_j |z|^2 - 2 x_j t)/r^2
        x = np.asarray(x, dtype=float)
        xs, ys, t = x[..., :m], x[..., m:2 * m], x[..., 2 * m:2 * m + 1]
        z2 = np.sum(x[..., :2 * m] ** 2, axis=-1, keepdims=True)
        r2 = np.sqrt(z2 ** 2 + t ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            gx = (2.0 * xs * z2 + 2.0 * ys * t) / r2
            gy = (2.0 * ys * z2 - 2.0 * xs * t) / r2
        out = np.concatenate([gx, gy], axis=-1)
        return np.where(r2 > 0, out, 0.0)

    return CarnotGroup(
        kind="heisenberg",
        layer_dims=(2 * m, 1),
        group_law=law,
        inverse_law=lambda x: -np.asarray(x, float),
        hom_norm=norm,
        frame_coeffs=frame,
        norm_sq_frame=nsf,
        unit_box=(1.0,) * (2 * m) + (1.0,),
        params={"m": m},
    )


def make_custom(
    layer_dims: Sequence[int],
    group_law,
    inverse_law,
    hom_norm,
    frame_coeffs,
    norm_sq_frame=None,
    name: str = "custom",
    rng: Optional[np.random.Generator] = None,
    check: bool = True,
    grad_norm_samples: int = 2000,
) -> CarnotGroup:
    """Wrap user closures into a group, with sampled sanity checks.

    The supplied norm is rescaled so that the sampled sup of the horizontal
    gradient |grad_0 r| is <= 1.  Invariants (identity/inverse, dilation
    automorphism, norm homogeneity) are spot checked at construction unless
    ``check`` is False.
    """
    rng = rng or np.random.default_rng(0)
    proto = CarnotGroup(
        kind=name,
        layer_dims=tuple(int(d) for d in layer_dims),
        group_law=group_law,
        inverse_law=inverse_law,
        hom_norm=hom_norm,
        frame_coeffs=frame_coeffs,
        norm_sq_frame=norm_sq_frame,
    )
    n = proto.topological_dim

    # rescale so that |grad_0 r| <= 1 on samples
    pts = rng.normal(size=(grad_norm_samples, n))
    r = np.asarray(hom_norm(pts))
    keep = r > 1e-6
    pts, r = pts[keep], r[keep]
    nsf = proto.norm_sq_frame or proto.norm_sq_frame_fd
    grad_r = nsf(pts) / (2.0 * r[:, None])
    sup = float(np.max(np.linalg.norm(grad_r, axis=-1)))
    scale = 1.0 / sup if sup > 1.0 else 1.0

    scaled_norm = (lambda x: scale * np.asarray(hom_norm(x))) if scale != 1.0 else hom_norm
    if norm_sq_frame is not None and scale != 1.0:
        base = norm_sq_frame
        scaled_nsf = lambda x: (scale ** 2) * np.asarray(base(x))
    else:
        scaled_nsf = norm_sq_frame

    # box containing the unit ball, from samples rescaled onto {r ~ 1}
    on_sphere = pts / np.power(r[:, None] / scale, proto.layer_weights)
    unit_box = tuple(1.05 * np.max(np.abs(on_sphere), axis=0))

    g = CarnotGroup(
        kind=name,
        layer_dims=proto.layer_dims,
        group_law=group_law,
        inverse_law=inverse_law,
        hom_norm=scaled_norm,
        frame_coeffs=frame_coeffs,
        norm_sq_frame=scaled_nsf,
        unit_box=unit_box,
        params={"scale": scale},
    )
    if check:
        report = selfcheck(g, rng=rng, n_samples=200)
        bad = [item for item in report if not item["pass"]]
        if bad:
            names = ", ".join(item["name"] for item in bad)
            raise ValueError(f"custom group fails sampled invariants: {names}")
    return g


# ---------------------------------------------------------------------------
# operations


def compose(g: CarnotGroup, x, y) -> np.ndarray:
    return g.group_law(_check_point(g, x), _check_point(g, y))


def inverse(g: CarnotGroup, x) -> np.ndarray:
    return g.inverse_law(_check_point(g, x))


def dilate(g: CarnotGroup, R: float, x) -> np.ndarray:
    return g.dilation(R, _check_point(g, x))


def frame_vector(g: CarnotGroup, j: int, x) -> np.ndarray:
    """Ambient coefficient vector of the j-th horizontal field (1-based)."""
    if not 1 <= j <= g.horizontal_dim:
        raise ValueError(
            f"horizontal index {j} out of range 1..{g.horizontal_dim}")
    return g.frame_coeffs(_check_point(g, x))[..., j - 1, :]


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    n_samples: int

    @property
    def relative_error(self) -> float:
        return self.std_error / self.value if self.value else float("inf")


def ball_volume_estimate(
    g: CarnotGroup, R: float, n_samples: int,
    rng: Optional[np.random.Generator] = None,
) -> VolumeEstimate:
    """Monte Carlo estimate of vol({r(x) < R}) with its standard error."""
    if R <= 0:
        raise ValueError("radius must be positive")
    if n_samples < 1000:
        raise ValueError("need at least 10^3 samples")
    rng = rng or np.random.default_rng()
    half = np.asarray(g.unit_box) * np.power(float(R), g.layer_weights)
    box_vol = float(np.prod(2.0 * half))
    pts = rng.uniform(-1.0, 1.0, size=(n_samples, g.topological_dim)) * half
    inside = g.hom_norm(pts) < R
    p = float(np.mean(inside))
    err = box_vol * np.sqrt(max(p * (1.0 - p), 1.0 / n_samples) / n_samples)
    return VolumeEstimate(value=box_vol * p, std_error=err, n_samples=n_samples)


# ---------------------------------------------------------------------------
# serialization (built-in kinds only; custom groups register programmatically)


def group_to_json(g: CarnotGroup) -> str:
    if g.kind == "euclidean":
        doc = {"kind": "euclidean", "Q": g.params["Q"]}
    elif g.kind == "heisenberg":
        doc = {"kind": "heisenberg", "m": g.params["m"]}
    else:
        doc = {"kind": "custom", "layer_dims": list(g.layer_dims)}
    return json.dumps(doc)


def group_from_json(doc) -> CarnotGroup:
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("kind")
    if kind == "euclidean":
        return make_euclidean(int(doc["Q"]))
    if kind == "heisenberg":
        return make_heisenberg(int(doc["m"]))
    raise ValueError(f"cannot rebuild group of kind {kind!r} from JSON; "
                     "custom groups must be registered programmatically")


# ---------------------------------------------------------------------------
# sampled invariant suite


def selfcheck(
    g: CarnotGroup,
    rng: Optional[np.random.Generator] = None,
    n_samples: int = 1000,
) -> list[dict]:
    """Run the sampled group-axiom and norm-identity checks.

    Returns one record per invariant: {name, residual, tol, pass}.
    """
    rng = rng or np.random.default_rng(0)
    n = g.topological_dim
    x = rng.normal(size=(n_samples, n))
    y = rng.normal(size=(n_samples, n))
    z = rng.normal(size=(n_samples, n))
    results = []

    def record(name, residual, tol):
        residual = float(residual)
        results.append({"name": name, "residual": residual, "tol": tol,
                        "pass": residual <= tol})

    ident = g.origin()
    record("identity", np.max(np.abs(g.group_law(x, ident) - x)), 1e-12)
    record("inverse", np.max(np.abs(g.group_law(x, g.inverse_law(x)))), 1e-12)
    assoc = g.group_law(g.group_law(x, y), z) - g.group_law(x, g.group_law(y, z))
    record("associativity", np.max(np.abs(assoc)), 1e-10)

    for R in (0.5, 2.0, 3.7):
        auto = g.dilation(R, g.group_law(x, y)) - g.group_law(
            g.dilation(R, x), g.dilation(R, y))
        record(f"dilation_automorphism_R={R}", np.max(np.abs(auto)), 1e-9)
        hom = g.hom_norm(g.dilation(R, x)) - R * g.hom_norm(x)
        record(f"norm_homogeneity_R={R}", np.max(np.abs(hom)), 1e-9)

    record("norm_symmetry",
           np.max(np.abs(g.hom_norm(g.inverse_law(x)) - g.hom_norm(x))), 1e-10)
    record("norm_positivity", 0.0 if np.all(g.hom_norm(x) > 0) else 1.0, 0.5)

    # |grad_0 r| <= 1 on samples
    r = g.hom_norm(x)
    nsf = g.norm_sq_frame or g.norm_sq_frame_fd
    grad_r = nsf(x) / (2.0 * r[:, None])
    record("horizontal_norm_gradient_le_1",
           max(float(np.max(np.linalg.norm(grad_r, axis=-1))) - 1.0, 0.0), 1e-9)

    # c_{j,alpha} independent of the alpha-th coordinate (sampled derivative)
    coeffs = g.frame_coeffs(x)
    h = 1e-4
    worst = 0.0
    for alpha in range(n):
        bump = np.zeros(n)
        bump[alpha] = h
        diff = (g.frame_coeffs(x + bump) - coeffs)[..., :, alpha] / h
        worst = max(worst, float(np.max(np.abs(diff))))
    record("frame_coeff_triangular", worst, 1e-6)

    return results
