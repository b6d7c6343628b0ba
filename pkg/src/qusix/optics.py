"""Transverse fields for OAM eigenstates and their superpositions.

Every charge ``m`` is given the Laguerre-Gauss ``p = 0`` radial profile at
the waist plane, with one common waist for all charges.  Lengths are in
units of the waist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial, pi, sqrt
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Square sampling window ``[-window, window)`` with ``n`` pixels per side."""

    n: int = 512
    window: float = 8.0
    waist: float = 1.0

    def __post_init__(self):
        if self.n < 64 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 64, got {self.n}")
        if self.window <= 0:
            raise ValueError("window must be positive")
        if self.waist <= 0:
            raise ValueError("waist must be positive")

    @property
    def pixel(self) -> float:
        return 2 * self.window * self.waist / self.n

    @property
    def pixel_area(self) -> float:
        return self.pixel**2

    def axis(self) -> np.ndarray:
        # origin sits on pixel n//2 so vortex cores are sampled symmetrically
        return (np.arange(self.n) - self.n // 2) * self.pixel

    def polar(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.axis()
        X, Y = np.meshgrid(x, x)
        return np.hypot(X, Y), np.arctan2(Y, X)


@dataclass(frozen=True)
class FieldGrid:
    spec: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (self.spec.n, self.spec.n):
            raise ValueError(f"amplitudes shape {a.shape} does not match grid n={self.spec.n}")
        if not np.all(np.isfinite(a)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "amplitudes", a)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.spec.pixel_area))

    def normalized(self) -> "FieldGrid":
        nrm = self.norm()
        if nrm == 0:
            return self
        return FieldGrid(self.spec, self.amplitudes / nrm)


@dataclass(frozen=True)
class OamSuperposition:
    """Coefficients over OAM eigenstates, as ``(charge, coefficient)`` terms."""

    terms: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        terms = tuple((int(m), complex(c)) for m, c in self.terms)
        charges = [m for m, _ in terms]
        if len(set(charges)) != len(charges):
            raise ValueError(f"repeated charge in {charges}")
        nrm = sqrt(sum(abs(c) ** 2 for _, c in terms))
        if abs(nrm - 1) > 1e-12:
            raise ValueError(f"coefficients must have unit norm, got {nrm}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_vector(cls, charges: Sequence[int], coeffs: Iterable[complex]) -> "OamSuperposition":
        coeffs = np.asarray(list(coeffs), dtype=complex)
        terms = [(m, c) for m, c in zip(charges, coeffs) if c != 0]
        return cls(tuple(terms))

    @classmethod
    def eigenstate(cls, m: int) -> "OamSuperposition":
        return cls(((m, 1.0),))

    @property
    def charges(self) -> list[int]:
        return [m for m, _ in self.terms]

    def coefficients(self, charges: Sequence[int]) -> np.ndarray:
        lookup = dict(self.terms)
        return np.array([lookup.get(m, 0) for m in charges], dtype=complex)


def lg_mode(m: int, spec: GridSpec) -> np.ndarray:
    """Continuum-normalised ``LG_{0,m}`` sampled on the grid at the waist."""
    r, phi = spec.polar()
    w = spec.waist
    am = abs(m)
    c = sqrt(2 / (pi * factorial(am))) / w
    return c * (sqrt(2) * r / w) ** am * np.exp(-((r / w) ** 2)) * np.exp(1j * m * phi)


def synthesize_mode(sup: OamSuperposition, spec: GridSpec = GridSpec()) -> FieldGrid:
    """Sum of ``c_k LG_{0,m_k}``, renormalised to unit L2 norm on the grid."""
    a = np.zeros((spec.n, spec.n), dtype=complex)
    for m, c in sup.terms:
        a += c * lg_mode(m, spec)
    return FieldGrid(spec, a).normalized()


def grid_inner_product(a: FieldGrid, b: FieldGrid) -> complex:
    """``<a|b>`` as the pixel sum of ``conj(a) b`` times the pixel area."""
    if a.spec != b.spec:
        raise ValueError("fields live on different grids")
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.spec.pixel_area)


def field_overlap(a: FieldGrid, b: FieldGrid) -> float:
    """Squared modulus of the normalised overlap of two fields."""
    ip = grid_inner_product(a, b)
    return abs(ip) ** 2 / (a.norm() ** 2 * b.norm() ** 2)


def intensity_map(f: FieldGrid) -> np.ndarray:
    return np.abs(f.amplitudes) ** 2


def phase_map(f: FieldGrid) -> np.ndarray:
    return np.mod(np.angle(f.amplitudes), 2 * np.pi)


def _to_uint8(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    scaled = (values - lo) / (hi - lo) * 256
    return np.clip(np.floor(scaled), 0, 255).astype(np.uint8)


def intensity_png(f: FieldGrid, path) -> Path:
    from PIL import Image

    inten = intensity_map(f)
    top = inten.max()
    img = np.zeros(inten.shape, dtype=np.uint8) if top == 0 else np.round(inten / top * 255).astype(np.uint8)
    Image.fromarray(img, mode="L").save(path)
    return Path(path)


def phase_png(values: np.ndarray, path) -> Path:
    """Linear map of phases in ``[0, 2pi)`` onto grey levels 0..255."""
    from PIL import Image

    Image.fromarray(_to_uint8(np.mod(values, 2 * np.pi), 0.0, 2 * np.pi), mode="L").save(path)
    return Path(path)


def save_raw(values: np.ndarray, spec: GridSpec, path, **extra) -> tuple[Path, Path]:
    """Write ``values`` as little-endian float32 plus a JSON header.

    Complex arrays are stored interleaved (re, im) and flagged in the header.
    """
    path = Path(path)
    values = np.asarray(values)
    header = {"n": spec.n, "window": spec.window, "waist": spec.waist}
    if np.iscomplexobj(values):
        data = np.stack([values.real, values.imag], axis=-1)
        header["complex"] = True
    else:
        data = values
        header["complex"] = False
    header.update(extra)
    data.astype("<f4").tofile(path)
    hdr = path.with_suffix(path.suffix + ".json")
    hdr.write_text(json.dumps(header, indent=2))
    return path, hdr


def load_raw(path) -> tuple[np.ndarray, GridSpec]:
    path = Path(path)
    header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    spec = GridSpec(header["n"], header["window"], header["waist"])
    data = np.fromfile(path, dtype="<f4")
    if header.get("complex"):
        data = data.reshape(spec.n, spec.n, 2)
        return data[..., 0] + 1j * data[..., 1], spec
    return data.reshape(spec.n, spec.n), spec
