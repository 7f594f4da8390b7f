"""Bijective unit-cube transformations: Beta-CDF warping and sphered rotation.

All maps send [0,1]^d onto itself. The Beta-CDF warp applies the same
(alpha, beta) CDF to every coordinate. The sphered rotation routes a rotation
through a cube-to-ball radial change of coordinates so the box stays
invariant: with z = 2x - 1,

    u  = z * ||z||_inf / ||z||_2      (cube onto the unit ball)
    v  = R u                          (rotate)
    z' = v * ||v||_2 / ||v||_inf      (ball back onto the cube)

which preserves infinity-norm shells and reduces to an exact signed
permutation of the centered coordinates whenever R is one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    NumericError,
    ParameterError,
)
from .specfun import ShapeParams, inv_reg_inc_beta, reg_inc_beta

__all__ = [
    "RotationMatrix",
    "TransformSpec",
    "apply_forward",
    "apply_inverse",
    "random_rotation",
    "rotation_matrix_2d",
]

_ORTHO_TOL = 1e-12  # per entry of R^T R - I
_DET_TOL = 1e-10
_CLAMP_TOL = 1e-12  # max out-of-box excursion tolerated after a transform

IDENTITY = "identity"
BETA_CDF = "beta_cdf"
SPHERED_ROTATION = "sphered_rotation"


@dataclass(frozen=True)
class RotationMatrix:
    """A proper rotation: orthogonal with determinant +1."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(
                f"rotation entries must be {self.dim}x{self.dim}, got {m.shape}"
            )
        err = np.max(np.abs(m.T @ m - np.eye(self.dim)))
        if err > _ORTHO_TOL:
            raise ParameterError(f"matrix is not orthogonal (|R^T R - I| = {err:.2e})")
        det = float(np.linalg.det(m))
        if abs(det - 1.0) > _DET_TOL:
            raise ParameterError(f"matrix is not a proper rotation (det = {det!r})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class TransformSpec:
    """Declarative description of one unit-cube transformation.

    Exactly the fields belonging to `kind` are populated. `seed` is carried
    for sphered rotations built from a seed so the transform can be serialized
    and named in run descriptors.
    """

    kind: str
    shape: ShapeParams | None = None
    rotation: RotationMatrix | None = None
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == IDENTITY:
            ok = self.shape is None and self.rotation is None
        elif self.kind == BETA_CDF:
            ok = self.shape is not None and self.rotation is None
        elif self.kind == SPHERED_ROTATION:
            ok = self.shape is None and self.rotation is not None
        else:
            raise ParameterError(f"unknown transform kind {self.kind!r}")
        if not ok:
            raise ParameterError(f"fields do not match transform kind {self.kind!r}")

    @staticmethod
    def identity() -> "TransformSpec":
        return TransformSpec(kind=IDENTITY)

    @staticmethod
    def beta_cdf(alpha: float, beta: float) -> "TransformSpec":
        return TransformSpec(kind=BETA_CDF, shape=ShapeParams(alpha, beta))

    @staticmethod
    def sphered_rotation(
        rotation: RotationMatrix | None = None,
        *,
        dim: int | None = None,
        seed: int | None = None,
    ) -> "TransformSpec":
        if rotation is None:
            if dim is None or seed is None:
                raise ParameterError("sphered_rotation needs a matrix or (dim, seed)")
            rotation = random_rotation(dim, seed)
        return TransformSpec(kind=SPHERED_ROTATION, rotation=rotation, seed=seed)

    @property
    def is_neutral(self) -> bool:
        """True when the transform acts as the identity map."""
        if self.kind == IDENTITY:
            return True
        if self.kind == BETA_CDF:
            return self.shape.alpha == 1.0 and self.shape.beta == 1.0
        return bool(np.array_equal(self.rotation.entries, np.eye(self.rotation.dim)))

    def descriptor(self) -> str:
        """Short name used in instance descriptors and CSV columns."""
        if self.kind == IDENTITY:
            return "id"
        if self.kind == BETA_CDF:
            return f"bcdf-a{self.shape.alpha:g}-b{self.shape.beta:g}"
        if self.seed is not None:
            return f"rot-seed{self.seed}"
        return "rot-custom"

    def to_config(self) -> dict:
        """JSON-ready form. Custom rotation matrices cannot be serialized."""
        if self.kind == IDENTITY:
            return {"kind": IDENTITY}
        if self.kind == BETA_CDF:
            return {"kind": BETA_CDF, "alpha": self.shape.alpha, "beta": self.shape.beta}
        if self.seed is None:
            raise ConfigError("sphered rotation without a seed is not serializable")
        return {"kind": SPHERED_ROTATION, "dim": self.rotation.dim, "seed": self.seed}

    @staticmethod
    def from_config(cfg: dict, dim: int | None = None) -> "TransformSpec":
        """Build a spec from its JSON form.

        `dim` supplies the dimensionality for sphered rotations whose config
        omits it (the harness instantiates one matrix per problem dimension).
        """
        if not isinstance(cfg, dict) or "kind" not in cfg:
            raise ConfigError(f"transform config must be a dict with 'kind': {cfg!r}")
        kind = cfg["kind"]
        if kind == IDENTITY:
            return TransformSpec.identity()
        if kind == BETA_CDF:
            try:
                return TransformSpec.beta_cdf(float(cfg["alpha"]), float(cfg["beta"]))
            except KeyError as exc:
                raise ConfigError(f"beta_cdf config needs alpha and beta: {cfg!r}") from exc
        if kind == SPHERED_ROTATION:
            cfg_dim = cfg.get("dim", dim)
            if cfg_dim is None:
                raise ConfigError(f"sphered_rotation config needs a dim: {cfg!r}")
            if dim is not None and cfg_dim != dim:
                raise ConfigError(
                    f"sphered_rotation dim {cfg_dim} does not match problem dim {dim}"
                )
            if "seed" not in cfg:
                raise ConfigError(f"sphered_rotation config needs a seed: {cfg!r}")
            return TransformSpec.sphered_rotation(dim=int(cfg_dim), seed=int(cfg["seed"]))
        raise ConfigError(f"unknown transform kind {kind!r}")


def random_rotation(dim: int, seed: int) -> RotationMatrix:
    """Haar-uniform sample from SO(dim), deterministic in the seed.

    QR-orthonormalizes a standard Gaussian matrix, fixes the factorization
    sign so the distribution is Haar over O(dim), then flips one column if
    needed to land in SO(dim).
    """
    if dim < 2:
        raise ParameterError(f"rotation dimension must be at least 2, got {dim}")
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    q = q * signs
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return RotationMatrix(dim=dim, entries=q)


def rotation_matrix_2d(angle: float) -> RotationMatrix:
    """Planar rotation by `angle` radians (counter-clockwise)."""
    c, s = math.cos(angle), math.sin(angle)
    return RotationMatrix(dim=2, entries=np.array([[c, -s], [s, c]]))


def _as_points(x, t: TransformSpec) -> tuple[np.ndarray, bool]:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[np.newaxis, :]
        single = True
    elif pts.ndim == 2:
        single = False
    else:
        raise DimensionError(f"expected a point or a batch of points, got shape {pts.shape}")
    if pts.shape[1] == 0:
        raise DimensionError("points must have at least one coordinate")
    if not np.all(np.isfinite(pts)):
        raise DomainError("point coordinates must be finite")
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise DomainError("point coordinates must lie in [0, 1]")
    if t.kind == SPHERED_ROTATION and pts.shape[1] != t.rotation.dim:
        raise DimensionError(
            f"point dimension {pts.shape[1]} does not match rotation dim {t.rotation.dim}"
        )
    return pts, single


def _clamp_unit(pts: np.ndarray) -> np.ndarray:
    excess = max(float(np.max(pts - 1.0, initial=0.0)), float(np.max(-pts, initial=0.0)))
    if excess > _CLAMP_TOL:
        raise NumericError(f"transform left the unit cube by {excess:.3e}")
    return np.clip(pts, 0.0, 1.0)


def _rotate(pts: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    z = 2.0 * pts - 1.0
    ninf = np.max(np.abs(z), axis=1)
    nonzero = ninf > 0.0
    out = pts.copy()
    if not np.any(nonzero):
        return out
    z = z[nonzero]
    n2 = np.sqrt(np.sum(z * z, axis=1))
    u = z * (ninf[nonzero] / n2)[:, np.newaxis]
    v = u @ matrix.T
    v2 = np.sqrt(np.sum(v * v, axis=1))
    vinf = np.max(np.abs(v), axis=1)
    zp = v * (v2 / vinf)[:, np.newaxis]
    out[nonzero] = (zp + 1.0) / 2.0
    return out


def _warp(pts: np.ndarray, shape: ShapeParams, inverse: bool) -> np.ndarray:
    fn = inv_reg_inc_beta if inverse else reg_inc_beta
    if pts.size <= 16:  # scalar path beats numpy dispatch for single points
        out = np.array([fn(float(v), shape) for v in pts.ravel()])
        return out.reshape(pts.shape)
    return fn(pts, shape)


def _apply(t: TransformSpec, x, inverse: bool):
    pts, single = _as_points(x, t)
    if t.kind == IDENTITY:
        out = pts.copy()
    elif t.kind == BETA_CDF:
        out = _clamp_unit(_warp(pts, t.shape, inverse))
    else:
        m = t.rotation.entries
        out = _clamp_unit(_rotate(pts, m.T if inverse else m))
    return out[0] if single else out


def apply_forward(t: TransformSpec, x) -> np.ndarray:
    """Apply the transform to a point in [0,1]^d or a batch of shape (n, d).

    Args:
        t: Transform description.
        x: Point (d,) or batch (n, d) with coordinates in [0, 1].

    Returns:
        Transformed point(s), same shape, inside [0, 1].
    """
    return _apply(t, x, inverse=False)


def apply_inverse(t: TransformSpec, y) -> np.ndarray:
    """Invert the transform; see apply_forward for shapes and domains."""
    return _apply(t, y, inverse=True)
