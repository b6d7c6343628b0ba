"""Phase-only kinoforms that encode amplitude through fringe contrast.

The mask is ``M = Mod(Phi - pi*I + 2*pi*x/period, 2*pi) * I`` with
``I = 1 + sinc^-1(A)/pi``; its first diffraction order reproduces the
target ``A exp(i Phi)`` up to a global sign.  The far field is simulated
with an FFT and the first order is isolated by a disc of radius
``1/(2*period)`` around the carrier, as a single-mode-fibre stand-in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .optics import FieldGrid, GridSpec, OamSuperposition, field_overlap, synthesize_mode

SINC_TOL = 1e-7
DEFAULT_PERIOD = 16.0
# narrower than the optics default: w0 spans 64 px, so the mode spectrum
# sits well inside the first-order disc at period 16
KINOFORM_GRID = GridSpec(n=512, window=4.0)


class OrderOverlapError(ValueError):
    """Grating period too short to separate diffraction orders on this grid."""


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def _dsinc(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0, 1.0, x)
    return np.where(x == 0, 0.0, (safe * np.cos(safe) - np.sin(safe)) / safe**2)


def inverse_sinc(y, tol: float = 1e-13, max_iter: int = 100):
    """Solve ``sin(x)/x = y`` for ``x`` in ``[-pi, 0]``.

    Newton's method from ``x0 = -pi*(1-y)``, falling back to bisection
    whenever a step would leave the current bracket.  Works elementwise on
    arrays; scalars come back as floats.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y_arr)) or np.any((y_arr < 0) | (y_arr > 1)):
        raise ValueError("inverse_sinc is defined for 0 <= y <= 1")
    lo = np.full(y_arr.shape, -np.pi)
    hi = np.zeros(y_arr.shape)
    x = -np.pi * (1 - y_arr)
    for _ in range(max_iter):
        f = _sinc(x) - y_arr
        done = np.abs(f) <= tol
        if np.all(done | (hi - lo <= 1e-15)):
            break
        # sinc is increasing on [-pi, 0]
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        df = _dsinc(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - f / df
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        x = np.where(done, x, xn)
    x = np.where(y_arr == 1, 0.0, np.where(y_arr == 0, -np.pi, x))
    if x.ndim == 0:
        return float(x)
    return x


@dataclass(frozen=True)
class TargetMode:
    """Normalised amplitude ``A`` in ``[0, 1]`` and phase ``Phi``."""

    A: np.ndarray
    Phi: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        Phi = np.broadcast_to(np.asarray(self.Phi, dtype=float), A.shape)
        if np.any(~np.isfinite(A)) or np.any(~np.isfinite(Phi)):
            raise ValueError("target contains non-finite values")
        top = A.max() if A.size else 0.0
        if top > 0:
            A = A / top
        object.__setattr__(self, "A", np.clip(A, 0.0, 1.0))
        object.__setattr__(self, "Phi", np.array(Phi))

    @classmethod
    def from_field(cls, f: FieldGrid) -> "TargetMode":
        return cls(np.abs(f.amplitudes), np.angle(f.amplitudes))

    @classmethod
    def from_superposition(cls, sup: OamSuperposition, spec: GridSpec = KINOFORM_GRID) -> "TargetMode":
        return cls.from_field(synthesize_mode(sup, spec))

    @classmethod
    def azimuthal(cls, sup: OamSuperposition, spec: GridSpec = KINOFORM_GRID) -> "TargetMode":
        """Angle-only target ``sum c_m exp(i m phi)``, ignoring the radial profile."""
        _, phi = spec.polar()
        u = sum(c * np.exp(1j * m * phi) for m, c in sup.terms)
        return cls(np.abs(u), np.angle(u))


@dataclass(frozen=True)
class Kinoform:
    spec: GridSpec
    phase: np.ndarray
    grating_period: float

    def __post_init__(self):
        if self.grating_period < 4:
            raise OrderOverlapError(f"grating period {self.grating_period} px is below 4 px")


def fringe_contrast(A: np.ndarray) -> np.ndarray:
    """``I = 1 + sinc^-1(A)/pi``, from 0 where ``A = 0`` to 1 where ``A = 1``."""
    return 1 + inverse_sinc(A) / np.pi


def pixel_x(spec: GridSpec) -> np.ndarray:
    return (np.arange(spec.n) - spec.n // 2).astype(float)[None, :]


def make_kinoform(t: TargetMode, period: float = DEFAULT_PERIOD, spec: GridSpec = KINOFORM_GRID) -> Kinoform:
    if t.A.shape != (spec.n, spec.n):
        raise ValueError(f"target shape {t.A.shape} does not match grid n={spec.n}")
    I = fringe_contrast(t.A)
    carrier = 2 * np.pi * pixel_x(spec) / period
    M = np.mod(t.Phi - np.pi * I + carrier, 2 * np.pi) * I
    # np.mod rounds tiny negative arguments up to exactly 2pi
    M = np.where(M >= 2 * np.pi, 0.0, M)
    return Kinoform(spec, M, float(period))


def plane_wave(spec: GridSpec) -> FieldGrid:
    return FieldGrid(spec, np.ones((spec.n, spec.n), dtype=complex))


def gaussian_beam(spec: GridSpec, waist: float | None = None) -> FieldGrid:
    r, _ = spec.polar()
    w = spec.window * spec.waist / 2 if waist is None else waist
    return FieldGrid(spec, np.exp(-((r / w) ** 2)).astype(complex))


def _check_orders(spec: GridSpec, period: float):
    if period < 4:
        raise OrderOverlapError(f"grating period {period} px is below 4 px")
    if spec.n / (2 * period) < 4:
        raise OrderOverlapError(
            f"first-order window of radius {spec.n / (2 * period):.2f} bins is too small on n={spec.n}"
        )


def first_order(k: Kinoform, input_field: FieldGrid | None = None) -> tuple[FieldGrid, float]:
    """Unnormalised first-order field and its share of the input power."""
    spec = k.spec
    if input_field is None:
        input_field = plane_wave(spec)
    if input_field.spec != spec:
        raise ValueError("input field and kinoform live on different grids")
    _check_orders(spec, k.grating_period)
    out = input_field.amplitudes * np.exp(1j * k.phase)
    F = np.fft.fft2(out)
    fx = np.fft.fftfreq(spec.n)
    FX, FY = np.meshgrid(fx, fx)
    disc = np.hypot(FX - 1 / k.grating_period, FY) <= 1 / (2 * k.grating_period)
    g = np.fft.ifft2(F * disc)
    # demodulate in real space so non-integer carrier bins re-centre exactly
    g *= np.exp(-2j * np.pi * pixel_x(spec) / k.grating_period)
    total = float(np.sum(np.abs(input_field.amplitudes) ** 2))
    power = float(np.sum(np.abs(g) ** 2))
    return FieldGrid(spec, g), (power / total if total > 0 else 0.0)


def simulate_first_order(k: Kinoform, input_field: FieldGrid | None = None) -> FieldGrid:
    g, _ = first_order(k, input_field)
    return g.normalized()


def generate(sup: OamSuperposition, period: float = DEFAULT_PERIOD, spec: GridSpec = KINOFORM_GRID,
             input_field: FieldGrid | None = None) -> FieldGrid:
    """Kinoform-generated field for one superposition state."""
    k = make_kinoform(TargetMode.from_superposition(sup, spec), period, spec)
    return simulate_first_order(k, input_field)


@dataclass(frozen=True)
class GenerationReport:
    overlaps: np.ndarray
    fidelities: np.ndarray


def generation_report(states: Sequence[OamSuperposition], period: float = DEFAULT_PERIOD,
                      spec: GridSpec = KINOFORM_GRID) -> GenerationReport:
    """Squared overlaps of generated fields (rows) with ideal fields (columns)."""
    ideal = [synthesize_mode(s, spec) for s in states]
    made = [generate(s, period, spec) for s in states]
    n = len(states)
    ov = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            ov[i, j] = field_overlap(ideal[j], made[i])
    return GenerationReport(ov, np.diag(ov).copy())


def kinoform_png(k: Kinoform, path):
    from .optics import phase_png

    return phase_png(k.phase, path)
