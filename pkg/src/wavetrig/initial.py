"""Named initial-data builders: standing-wave modes, a smooth compactly
supported bump, and nodal values loaded from a file."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ShapeError
from .grid import Field, Grid

__all__ = ["sine_mode", "bump", "load_nodal", "build_field"]


def sine_mode(g: Grid, k: int = 1) -> Field:
    """sin(k pi x / L), or the product sin(k pi x / a) sin(k pi y / b)."""
    if k < 1:
        raise ConfigurationError(f"mode number must be >= 1, got {k}")
    if g.ndim == 1:
        x = g.coords()
        return Field(np.sin(k * np.pi * x / g.shape.length), g)
    xx, yy = g.coords()
    vals = np.sin(k * np.pi * xx / g.shape.a) * np.sin(k * np.pi * yy / g.shape.b)
    return Field(vals.ravel(), g)


def _bump_profile(x: np.ndarray, length: float) -> np.ndarray:
    # Supported on the middle half of (0, length), peak value 1.
    u = (x - 0.5 * length) / (0.25 * length)
    out = np.zeros_like(x)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def bump(g: Grid) -> Field:
    """Smooth bump vanishing to all orders at the edge of its support."""
    if g.ndim == 1:
        return Field(_bump_profile(g.coords(), g.shape.length), g)
    xx, yy = g.coords()
    vals = _bump_profile(xx, g.shape.a) * _bump_profile(yy, g.shape.b)
    return Field(vals.ravel(), g)


def load_nodal(g: Grid, path: str) -> Field:
    """Nodal values from a .npy file or whitespace-separated text."""
    if str(path).endswith(".npy"):
        vals = np.load(path)
    else:
        vals = np.loadtxt(path)
    vals = np.asarray(vals, dtype=float)
    if vals.ndim == 2 and g.ndim == 2 and vals.shape == tuple(g.counts):
        vals = vals.ravel()
    if vals.ndim != 1 or vals.size != g.num_interior:
        raise ShapeError(
            f"file {path} holds {vals.shape} values, grid expects {g.num_interior} interior nodes"
        )
    return Field(vals, g)


def build_field(g: Grid, spec: dict) -> Field:
    """Build a field from a spec dict: {'kind': 'zero'|'sine'|'bump'|'file', ...}."""
    kind = spec.get("kind", "zero")
    if kind == "zero":
        return Field(np.zeros(g.num_interior), g)
    if kind == "sine":
        return sine_mode(g, int(spec.get("k", 1)))
    if kind == "bump":
        return bump(g)
    if kind == "file":
        if "path" not in spec:
            raise ConfigurationError("file initial data needs a 'path' entry")
        return load_nodal(g, spec["path"])
    raise ConfigurationError(f"unknown initial data kind {kind!r}")
