"""Numerical search for states and bases unbiased to a given MUB set.

Both searches minimise a quartic deviation from ``1/d`` by Riemannian
gradient descent (unit sphere for vectors, unitary group for bases) with a
Barzilai-Borwein trial step and Armijo backtracking.  All restarts run as
one batched array computation, so results depend only on ``(seed, cfg)``.

A nonzero residual floor is numerical evidence only; it never certifies
that an unbiased extension does not exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mub import Basis, MubSet

_ARMIJO = 1e-4
_MIN_STEP = 1e-14


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 20
    max_iterations: int = 2000
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class SearchResult:
    best_vector: np.ndarray
    residual: float
    iterations: int
    converged: bool
    restart_index: int
    all_residuals: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class FullSearchResult:
    bases: list[Basis]
    residual: float
    iterations: int
    converged: bool
    restart_index: int
    all_residuals: np.ndarray = field(repr=False)


def _check_dim(v: np.ndarray, s: MubSet):
    if v.shape[0] != s.dim:
        raise ValueError(f"dimension mismatch: vector {v.shape[0]} vs set {s.dim}")


def unbiasedness_residual(v: np.ndarray, s: MubSet) -> float:
    """Sum over all states ``b`` of ``s`` of ``(|<b|v>|^2 - 1/d)^2``."""
    v = np.asarray(v, dtype=complex)
    _check_dim(v, s)
    a = s.stacked().conj().T @ v
    return float(np.sum((np.abs(a) ** 2 - 1 / s.dim) ** 2))


def residual_gradient(v: np.ndarray, s: MubSet) -> np.ndarray:
    """Gradient of :func:`unbiasedness_residual` in the ambient space.

    Returned as a complex vector whose real and imaginary parts are the
    partial derivatives with respect to ``Re v`` and ``Im v``.
    """
    v = np.asarray(v, dtype=complex)
    _check_dim(v, s)
    B = s.stacked()
    a = B.conj().T @ v
    return 4 * B @ ((np.abs(a) ** 2 - 1 / s.dim) * a)


def _haar_vectors(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    z = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
    return z / np.linalg.norm(z, axis=0)


def search_extension_vector(s: MubSet, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Look for a unit vector unbiased to every basis in ``s``."""
    d = s.dim
    B = s.stacked()
    Bh = B.conj().T
    rng = np.random.default_rng(cfg.seed)
    V = _haar_vectors(rng, d, cfg.restarts)

    def value(V):
        a = Bh @ V
        return np.sum((np.abs(a) ** 2 - 1 / d) ** 2, axis=0), a

    def tangent_grad(V, a):
        g = 4 * B @ ((np.abs(a) ** 2 - 1 / d) * a)
        return g - V * np.real(np.sum(V.conj() * g, axis=0))

    f, a = value(V)
    g = tangent_grad(V, a)
    step = np.ones(cfg.restarts)
    active = np.ones(cfg.restarts, dtype=bool)
    iters = np.zeros(cfg.restarts, dtype=int)

    for _ in range(cfg.max_iterations):
        gn = np.sum(np.abs(g) ** 2, axis=0)
        active &= np.sqrt(gn) > cfg.tol
        if not active.any():
            break
        t = np.where(active, step, 0.0)
        while True:
            Vn = V - t * g
            Vn /= np.linalg.norm(Vn, axis=0)
            fn, an = value(Vn)
            bad = active & (fn > f - _ARMIJO * t * gn) & (t > _MIN_STEP)
            if not bad.any():
                break
            t = np.where(bad, t / 2, t)
        accept = active & (fn <= f)
        gnew = tangent_grad(Vn, an)
        s_ = Vn - V
        y_ = gnew - g
        sy = np.real(np.sum(s_.conj() * y_, axis=0))
        ss = np.sum(np.abs(s_) ** 2, axis=0)
        bb = np.clip(ss / np.where(sy > 0, sy, 1.0), 1e-8, 1e3)
        step = np.where(accept, np.where(sy > 0, bb, 1.0), step)
        V = np.where(accept, Vn, V)
        f = np.where(accept, fn, f)
        a = np.where(accept, an, a)
        g = np.where(accept, gnew, g)
        iters += active
        # a rejected step means the line search bottomed out: treat as stalled
        active &= accept & (t > _MIN_STEP)

    best = int(np.argmin(f))
    gbest = np.linalg.norm(g[:, best])
    return SearchResult(
        best_vector=V[:, best].copy(),
        residual=float(f[best]),
        iterations=int(iters[best]),
        converged=bool(gbest <= cfg.tol),
        restart_index=best,
        all_residuals=f.copy(),
    )


def _polar(U: np.ndarray) -> np.ndarray:
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh


def _full_objective(U: np.ndarray, d: int, k: int):
    """Pairwise unbiasedness + orthonormality penalty and its gradient.

    ``U`` has shape ``(R, k, d, d)``; returns values ``(R,)`` and the
    ambient gradient of the unbiasedness part, same shape as ``U``.
    """
    R = U.shape[0]
    S = U.transpose(0, 2, 1, 3).reshape(R, d, k * d)
    G = S.conj().transpose(0, 2, 1) @ S
    mask = ~np.kron(np.eye(k, dtype=bool), np.ones((d, d), dtype=bool))
    D = np.where(mask, np.abs(G) ** 2 - 1 / d, 0.0)
    cross = 0.5 * np.sum(D**2, axis=(1, 2))
    eye = np.eye(d)
    gram = U.conj().transpose(0, 1, 3, 2) @ U - eye
    ortho = np.sum(np.abs(gram) ** 2, axis=(1, 2, 3))
    grad_S = 4 * S @ (D * G)
    grad = grad_S.reshape(R, d, k, d).transpose(0, 2, 1, 3)
    return cross + ortho, grad


def _unitary_tangent(U: np.ndarray, G: np.ndarray) -> np.ndarray:
    A = U.conj().swapaxes(-1, -2) @ G
    return U @ (A - A.conj().swapaxes(-1, -2)) / 2


def mub_set_residual(bases: list[Basis] | MubSet) -> float:
    """Total pairwise deviation from ``1/d`` plus the orthonormality penalty."""
    mats = [b.matrix for b in bases]
    U = np.array(mats)[None]
    value, _ = _full_objective(U, U.shape[-1], U.shape[1])
    return float(value[0])


def search_full_mub_set(
    d: int, target_count: int, cfg: SearchConfig = SearchConfig()
) -> FullSearchResult:
    """Search for ``target_count`` pairwise unbiased bases in dimension ``d``.

    The first basis is pinned to the computational basis (any MUB set can be
    rotated there); the others move on the unitary group with a polar
    retraction, so the orthonormality penalty stays at rounding level.
    """
    if target_count < 2:
        raise ValueError("target_count must be >= 2")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    k = target_count
    R = cfg.restarts
    rng = np.random.default_rng(cfg.seed)
    Z = rng.standard_normal((R, k - 1, d, d)) + 1j * rng.standard_normal((R, k - 1, d, d))
    U = np.concatenate(
        [np.broadcast_to(np.eye(d, dtype=complex), (R, 1, d, d)), _polar(Z)], axis=1
    )

    def tangent(U, G):
        T = _unitary_tangent(U, G)
        T[:, 0] = 0
        return T

    f, G = _full_objective(U, d, k)
    g = tangent(U, G)
    step = np.full(R, 0.1)
    active = np.ones(R, dtype=bool)
    iters = np.zeros(R, dtype=int)
    bshape = (R, 1, 1, 1)

    for _ in range(cfg.max_iterations):
        gn = np.sum(np.abs(g) ** 2, axis=(1, 2, 3))
        active &= (np.sqrt(gn) > cfg.tol) & (f > cfg.tol**2)
        if not active.any():
            break
        t = np.where(active, step, 0.0)
        while True:
            Un = _polar(U - t.reshape(bshape) * g)
            fn, Gn = _full_objective(Un, d, k)
            bad = active & (fn > f - _ARMIJO * t * gn) & (t > _MIN_STEP)
            if not bad.any():
                break
            t = np.where(bad, t / 2, t)
        accept = active & (fn <= f)
        gnew = tangent(Un, Gn)
        s_ = Un - U
        y_ = gnew - g
        sy = np.real(np.sum(s_.conj() * y_, axis=(1, 2, 3)))
        ss = np.sum(np.abs(s_) ** 2, axis=(1, 2, 3))
        bb = np.clip(ss / np.where(sy > 0, sy, 1.0), 1e-6, 1e3)
        step = np.where(accept, np.where(sy > 0, bb, 1.0), step)
        sel = accept.reshape(bshape)
        U = np.where(sel, Un, U)
        g = np.where(sel, gnew, g)
        f = np.where(accept, fn, f)
        iters += active
        active &= accept & (t > _MIN_STEP)

    best = int(np.argmin(f))
    gbest = float(np.sqrt(np.sum(np.abs(g[best]) ** 2)))
    bases = [Basis(U[best, j], f"S{j + 1}") for j in range(k)]
    return FullSearchResult(
        bases=bases,
        residual=float(f[best]),
        iterations=int(iters[best]),
        converged=bool(gbest <= cfg.tol or f[best] <= cfg.tol**2),
        restart_index=best,
        all_residuals=f.copy(),
    )


def search_report(s: MubSet, result: SearchResult) -> dict:
    """JSON-ready summary of an extension search."""
    return {
        "dim": s.dim,
        "bases_in": s.labels,
        "restarts": int(result.all_residuals.size),
        "best_residual": result.residual,
        "converged": result.converged,
        "iterations": result.iterations,
        "best_vector": [[float(z.real), float(z.imag)] for z in result.best_vector],
    }
