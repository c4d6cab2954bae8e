"""Algebra and analysis on SISO descriptor realizations and transfer maps.

A descriptor realization is the implicit state-space form

    E dx/dt = A x + B u,    y = C x + D u,

with possibly singular E; its transfer function is H(s) = C (sE - A)^{-1} B + D.
This module evaluates such realizations, computes their generalized pole
spectrum, splits them additively into stable and antistable parts, composes
them (series, summation, unity feedback), estimates grid L-infinity norms,
forms delayed closed loops at the evaluator level, and integrates step
responses.

The :class:`TransferMap` wrapper lets rational realizations and irrational
closed-form models (square roots, delays) flow through the same analysis
code paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    BoundaryPoleError,
    LoopSingularityError,
    PoleHitError,
    SimulationError,
    SingularPencilError,
)

__all__ = [
    "DescriptorRealization",
    "TransferMap",
    "SpectrumReport",
    "StableSplit",
    "GridNorm",
    "StepResponse",
    "eval_transfer",
    "poles",
    "stable_antistable_split",
    "linf_norm_grid",
    "closed_loop_delay",
    "simulate_step",
    "series",
    "feedback_unity",
    "add",
    "scale",
    "densify_log_grid",
    "realization_to_json",
    "realization_from_json",
    "save_realization",
    "load_realization",
]

# Fixed probe points for pencil-regularity checks: arbitrary irrational-ish
# locations that no structured model places an eigenvalue on.
_PROBE_POINTS = np.array(
    [0.91723 + 0.70811j, -1.31847 + 2.09253j, 3.66117 - 0.58441j]
)


def _as_real_matrix(name: str, M, shape: tuple[int, int]) -> np.ndarray:
    M = np.asarray(M)
    if np.iscomplexobj(M):
        if np.max(np.abs(M.imag), initial=0.0) > 0.0:
            raise ValueError(f"{name} must be real, got complex entries")
        M = M.real
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape != shape:
        raise ValueError(f"{name} has shape {M.shape}, expected {shape}")
    return M


@dataclass(frozen=True)
class DescriptorRealization:
    """Real SISO descriptor realization (E, A, B, C, D) of order n.

    The pencil (E, A) must be regular, i.e. det(sE - A) must not vanish
    identically; this is probed at three fixed complex points on
    construction.  Order zero (pure feed-through D) is allowed.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float = 0.0

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        n = A.shape[0]
        object.__setattr__(self, "E", _as_real_matrix("E", self.E, (n, n)))
        object.__setattr__(self, "A", _as_real_matrix("A", self.A, (n, n)))
        object.__setattr__(self, "B", _as_real_matrix("B", self.B, (n, 1)))
        object.__setattr__(self, "C", _as_real_matrix("C", self.C, (1, n)))
        d = complex(self.D)
        if d.imag != 0.0:
            raise ValueError("D must be real")
        object.__setattr__(self, "D", float(d.real))
        if n > 0:
            self._check_regular()

    def _check_regular(self) -> None:
        # Cap the probe scale so a vanishing E (pure polynomial part)
        # cannot overflow s*E - A; beyond the cap E is negligible anyway.
        nE = float(np.linalg.norm(self.E, "fro"))
        nA = float(np.linalg.norm(self.A, "fro"))
        scale = max(1.0, nA / nE) if nE > 1e-12 * nA else 1e12
        for s in _PROBE_POINTS * scale:
            sign, _ = np.linalg.slogdet(s * self.E - self.A)
            if sign != 0:
                return
        raise SingularPencilError(
            "pencil (E, A) appears singular at all probe points"
        )

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def transfer_map(self, label: str = "") -> "TransferMap":
        return TransferMap.from_realization(self, label=label)


@dataclass(frozen=True)
class SpectrumReport:
    """Finite generalized eigenvalues plus the count of infinite ones."""

    finite: np.ndarray
    infinite_count: int


@dataclass(frozen=True)
class StableSplit:
    """Additive decomposition H = H_stable + H_antistable.

    The feed-through term is assigned to the stable part; the antistable
    part is strictly proper with all its poles in Re(s) >= 0.
    """

    stable_part: DescriptorRealization
    antistable_part: DescriptorRealization


@dataclass(frozen=True)
class GridNorm:
    """Grid estimate of an L-infinity norm: peak value and its frequency."""

    value: float
    omega: float


@dataclass(frozen=True)
class StepResponse:
    t: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class TransferMap:
    """Evaluator abstraction s -> complex value.

    Wraps either a rational descriptor realization or an arbitrary
    closed-form complex function; evaluation is vectorized over arrays of
    points.  Carrying the realization (when one exists) lets downstream
    code fall back to state-space algorithms.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    realization: DescriptorRealization | None = None

    def __call__(self, s):
        scalar = np.isscalar(s) or (isinstance(s, np.ndarray) and s.ndim == 0)
        out = self.fn(np.asarray(s, dtype=complex))
        out = np.asarray(out, dtype=complex)
        return complex(out) if scalar and out.ndim == 0 else out

    @staticmethod
    def from_realization(rlz: DescriptorRealization, label: str = "") -> "TransferMap":
        return TransferMap(
            fn=lambda s: eval_transfer(rlz, s), label=label, realization=rlz
        )

    @staticmethod
    def from_callable(fn: Callable, label: str = "") -> "TransferMap":
        return TransferMap(fn=fn, label=label, realization=None)

    @staticmethod
    def constant(value: complex, label: str = "") -> "TransferMap":
        value = complex(value)
        rlz = None
        if value.imag == 0.0:
            rlz = DescriptorRealization(
                E=np.zeros((0, 0)), A=np.zeros((0, 0)),
                B=np.zeros((0, 1)), C=np.zeros((1, 0)), D=value.real,
            )
        return TransferMap(
            fn=lambda s, v=value: np.full(np.shape(s), v, dtype=complex),
            label=label or str(value),
            realization=rlz,
        )

    def __mul__(self, other: "TransferMap") -> "TransferMap":
        if not isinstance(other, TransferMap):
            return NotImplemented
        rlz = None
        if self.realization is not None and other.realization is not None:
            rlz = series(self.realization, other.realization)
        return TransferMap(
            fn=lambda s: self.fn(np.asarray(s, dtype=complex))
            * other.fn(np.asarray(s, dtype=complex)),
            label=f"({self.label})*({other.label})",
            realization=rlz,
        )


def eval_transfer(rlz: DescriptorRealization, s):
    """Evaluate C (sE - A)^{-1} B + D via batched linear solves.

    ``s`` may be a scalar or an ndarray of complex points; the result has
    the same shape.  A singular solve raises :class:`PoleHitError` naming
    the offending point.
    """
    s_arr = np.asarray(s, dtype=complex)
    scalar = s_arr.ndim == 0
    pts = np.atleast_1d(s_arr).ravel()
    n = rlz.order
    if n == 0:
        vals = np.full(pts.shape, complex(rlz.D))
    else:
        vals = np.empty(pts.shape, dtype=complex)
        # Chunk the stacked pencils so huge grids do not balloon memory.
        chunk = max(1, (1 << 22) // max(1, n * n))
        for lo in range(0, pts.size, chunk):
            blk = pts[lo : lo + chunk]
            T = blk[:, None, None] * rlz.E - rlz.A
            try:
                x = np.linalg.solve(T, np.broadcast_to(rlz.B, (blk.size,) + rlz.B.shape))
            except np.linalg.LinAlgError:
                bad = _find_singular_point(rlz, blk)
                raise PoleHitError(
                    f"transfer evaluation hit a pole at s = {bad}"
                ) from None
            vals[lo : lo + chunk] = (rlz.C @ x)[:, 0, 0] + rlz.D
    vals = vals.reshape(s_arr.shape) if not scalar else vals[0]
    return complex(vals) if scalar else vals


def _find_singular_point(rlz: DescriptorRealization, pts: np.ndarray) -> complex:
    for p in pts:
        sign, _ = np.linalg.slogdet(p * rlz.E - rlz.A)
        if sign == 0:
            return complex(p)
    return complex(pts[0])


def poles(rlz: DescriptorRealization) -> SpectrumReport:
    """Finite generalized eigenvalues of (A, E); infinite ones counted apart.

    Directions along which E is singular produce eigenvalues at infinity
    (impulsive modes); they are excluded from the finite list.
    """
    n = rlz.order
    if n == 0:
        return SpectrumReport(finite=np.array([], dtype=complex), infinite_count=0)
    ab = scipy.linalg.eig(rlz.A, rlz.E, right=False, homogeneous_eigvals=True)
    alpha, beta = ab[0], ab[1]
    tol = n * np.finfo(float).eps * max(
        float(np.linalg.norm(rlz.E, "fro")), np.finfo(float).tiny
    )
    finite_mask = np.abs(beta) > tol
    finite = alpha[finite_mask] / beta[finite_mask]
    return SpectrumReport(
        finite=finite, infinite_count=int(np.sum(~finite_mask))
    )


def _empty_realization(d: float = 0.0) -> DescriptorRealization:
    return DescriptorRealization(
        E=np.zeros((0, 0)), A=np.zeros((0, 0)),
        B=np.zeros((0, 1)), C=np.zeros((1, 0)), D=d,
    )


def _sylvester_residual(A11, R, L, A22, A12):
    num = np.linalg.norm(A11 @ R + L @ A22 + A12)
    den = (
        np.linalg.norm(A11) * np.linalg.norm(R)
        + np.linalg.norm(L) * np.linalg.norm(A22)
        + np.linalg.norm(A12)
    )
    return num / max(den, np.finfo(float).tiny)


def _stable_select(alpha, beta):
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = alpha / beta
    ok = np.isfinite(lam)
    out = np.zeros(np.shape(alpha), dtype=bool)
    out[ok] = lam[ok].real < 0.0
    return out


def stable_antistable_split(
    rlz: DescriptorRealization, guard: float = 1e-8
) -> StableSplit:
    """Split a realization into stable and antistable additive parts.

    The generalized Schur form of (A, E) is reordered so the open-left-
    half-plane eigenvalues lead, then the off-diagonal coupling blocks are
    annihilated with a generalized Sylvester solve, yielding two decoupled
    descriptor systems whose transfers sum to the original.  Eigenvalues at
    infinity travel with the antistable block.  Any finite pole whose real
    part lies within ``guard`` of the imaginary axis aborts the split.
    """
    n = rlz.order
    if n == 0:
        return StableSplit(rlz, _empty_realization(0.0))
    spec = poles(rlz)
    near = spec.finite[np.abs(spec.finite.real) < guard]
    if near.size:
        raise BoundaryPoleError(
            f"poles within {guard:g} of the imaginary axis: {near}"
        )
    n_stable = int(np.sum(spec.finite.real < 0))
    if n_stable == n:
        return StableSplit(rlz, _empty_realization(0.0))
    if n_stable == 0 and spec.infinite_count == 0:
        anti = DescriptorRealization(rlz.E, rlz.A, rlz.B, rlz.C, 0.0)
        return StableSplit(_empty_realization(rlz.D), anti)

    S, T, alpha, beta, Q, Z = scipy.linalg.ordqz(
        rlz.A, rlz.E, sort=_stable_select, output="real"
    )
    mask = _stable_select(alpha, beta)
    k = int(np.sum(mask))
    if not mask[:k].all() or mask[k:].any():
        raise SingularPencilError("generalized Schur reordering failed")
    Bt = Q.T @ rlz.B
    Ct = rlz.C @ Z
    if k == 0:
        anti = DescriptorRealization(T, S, Bt, Ct, 0.0)
        return StableSplit(_empty_realization(rlz.D), anti)

    S11, S12, S22 = S[:k, :k], S[:k, k:], S[k:, k:]
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    # Decouple: find R, L with S11 R + L S22 = -S12 and T11 R + L T22 = -T12,
    # solved by LAPACK's generalized Sylvester routine (which uses the
    # convention S11 R - L' S22 = scale*C, hence the sign flip on L).
    tgsyl = scipy.linalg.get_lapack_funcs(
        ("tgsyl",), (S11, S22, T11, T22)
    )[0]
    r_, l_, scale_, _dif, info = tgsyl(S11, S22, -S12, T11, T22, -T12)
    if info < 0 or scale_ == 0.0:
        raise SingularPencilError(
            f"generalized Sylvester solve failed (info={info})"
        )
    R = r_ / scale_
    L = -l_ / scale_
    if info > 0:
        # The two spectra nearly overlap and LAPACK returned a perturbed
        # solution; keep it only if it actually decouples the blocks.
        res = max(
            _sylvester_residual(S11, R, L, S22, S12),
            _sylvester_residual(T11, R, L, T22, T12),
        )
        if not np.isfinite(res) or res > 1e-8:
            raise SingularPencilError(
                "generalized Sylvester solve ill conditioned "
                f"(info={info}, residual={res:.2e})"
            )

    B1 = Bt[:k] + L @ Bt[k:]
    B2 = Bt[k:]
    C1 = Ct[:, :k]
    C2 = Ct[:, :k] @ R + Ct[:, k:]
    stable = DescriptorRealization(T11, S11, B1, C1, rlz.D)
    anti = DescriptorRealization(T22, S22, B2, C2, 0.0)
    return StableSplit(stable, anti)


def linf_norm_grid(h: TransferMap, grid) -> GridNorm:
    """Max of |h(i*omega)| over a frequency grid, with the argmax frequency."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("frequency grid is empty")
    try:
        vals = h(1j * grid)
    except Exception:
        # Vectorized evaluation failed somewhere; locate the offender so the
        # error names a frequency.
        for w in grid:
            try:
                h(1j * w)
            except Exception as exc:
                raise type(exc)(f"{exc} (at omega = {w:g} rad/s)") from exc
        raise
    mags = np.abs(np.asarray(vals))
    idx = int(np.argmax(mags))
    return GridNorm(value=float(mags[idx]), omega=float(grid[idx]))


def closed_loop_delay(h: TransferMap, k: TransferMap, tau: float) -> TransferMap:
    """Complementary-sensitivity style loop with an input delay on feedback.

    Returns the evaluator s -> h(s)k(s) / (1 + h(s)k(s)e^{-tau*s}).  With
    tau = 0 this is the plain unity-feedback closed loop.
    """
    if tau < 0:
        raise ValueError(f"delay must be nonnegative, got {tau}")

    def fn(s):
        s = np.asarray(s, dtype=complex)
        loop = h(s) * k(s)
        den = 1.0 + loop * np.exp(-tau * s)
        if np.any(np.abs(den) < 1e-300):
            bad = np.asarray(s).ravel()[
                int(np.argmin(np.abs(np.atleast_1d(den))))
            ]
            raise LoopSingularityError(
                f"return difference vanished at s = {bad}"
            )
        return loop / den

    return TransferMap(
        fn=fn, label=f"closed_loop(h={h.label}, k={k.label}, tau={tau:g})"
    )


def simulate_step(
    rlz: DescriptorRealization,
    t_end: float,
    dt: float,
    origin_guard: float = 1e-3,
) -> StepResponse:
    """Unit-step response by fixed-step trapezoidal integration.

    Requires an invertible E (index-0 descriptor); models carrying a pole
    within ``origin_guard`` of the origin are rejected, since their step
    response diverges (or settles only past any finite horizon) and the
    result would be noise.
    """
    if dt <= 0:
        raise SimulationError(f"step size must be positive, got {dt}")
    if t_end <= dt:
        raise SimulationError(f"horizon {t_end} must exceed the step {dt}")
    n = rlz.order
    t = np.arange(0.0, t_end + dt / 2, dt)
    if n == 0:
        return StepResponse(t=t, y=np.full(t.shape, rlz.D))
    spec = poles(rlz)
    if spec.infinite_count:
        raise SimulationError(
            "E is singular (impulsive modes present); reduce the index first"
        )
    if spec.finite.size and np.min(np.abs(spec.finite)) < origin_guard:
        worst = spec.finite[int(np.argmin(np.abs(spec.finite)))]
        raise SimulationError(
            f"pole at the origin (|{worst:.3g}| < {origin_guard:g}): "
            "step response does not settle"
        )
    M_left = rlz.E - (dt / 2) * rlz.A
    M_right = rlz.E + (dt / 2) * rlz.A
    lu = scipy.linalg.lu_factor(M_left)
    b = dt * rlz.B[:, 0]
    x = np.zeros(n)
    y = np.empty(t.shape)
    y[0] = rlz.D
    for i in range(1, t.size):
        x = scipy.linalg.lu_solve(lu, M_right @ x + b)
        y[i] = float(rlz.C[0] @ x) + rlz.D
    return StepResponse(t=t, y=y)


def series(g: DescriptorRealization, k: DescriptorRealization) -> DescriptorRealization:
    """Realization of the product transfer g(s) * k(s) (k feeds g)."""
    ng, nk = g.order, k.order
    E = np.block([
        [g.E, np.zeros((ng, nk))],
        [np.zeros((nk, ng)), k.E],
    ])
    A = np.block([
        [g.A, g.B @ k.C],
        [np.zeros((nk, ng)), k.A],
    ])
    B = np.vstack([g.B * k.D, k.B])
    C = np.hstack([g.C, g.D * k.C])
    return DescriptorRealization(E, A, B, C, g.D * k.D)


def feedback_unity(loop: DescriptorRealization) -> DescriptorRealization:
    """Closed loop L/(1+L) of a loop-gain realization under unity feedback."""
    den = 1.0 + loop.D
    if abs(den) < 1e-12:
        raise LoopSingularityError(
            "unity feedback is singular: 1 + D vanishes"
        )
    return DescriptorRealization(
        E=loop.E,
        A=loop.A - (loop.B @ loop.C) / den,
        B=loop.B / den,
        C=loop.C / den,
        D=loop.D / den,
    )


def add(a: DescriptorRealization, b: DescriptorRealization) -> DescriptorRealization:
    """Realization of the sum transfer a(s) + b(s)."""
    na, nb = a.order, b.order
    E = np.block([
        [a.E, np.zeros((na, nb))],
        [np.zeros((nb, na)), b.E],
    ])
    A = np.block([
        [a.A, np.zeros((na, nb))],
        [np.zeros((nb, na)), b.A],
    ])
    B = np.vstack([a.B, b.B])
    C = np.hstack([a.C, b.C])
    return DescriptorRealization(E, A, B, C, a.D + b.D)


def scale(rlz: DescriptorRealization, factor: float) -> DescriptorRealization:
    return DescriptorRealization(
        rlz.E, rlz.A, rlz.B, factor * rlz.C, factor * rlz.D
    )


def densify_log_grid(grid, factor: int) -> np.ndarray:
    """Log-spaced grid over the same range with ``factor`` times the points."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size < 2:
        raise ValueError("need at least 2 grid points to densify")
    if np.any(grid <= 0):
        raise ValueError("log densification requires positive frequencies")
    return np.geomspace(grid.min(), grid.max(), int(factor) * grid.size)


def realization_to_json(rlz: DescriptorRealization) -> dict:
    return {
        "order": rlz.order,
        "E": rlz.E.tolist(),
        "A": rlz.A.tolist(),
        "B": rlz.B.tolist(),
        "C": rlz.C.tolist(),
        "D": rlz.D,
    }


def realization_from_json(obj: dict) -> DescriptorRealization:
    try:
        n = int(obj["order"])
        rlz = DescriptorRealization(
            E=np.array(obj["E"], dtype=float).reshape(n, n),
            A=np.array(obj["A"], dtype=float).reshape(n, n),
            B=np.array(obj["B"], dtype=float).reshape(n, 1),
            C=np.array(obj["C"], dtype=float).reshape(1, n),
            D=float(obj["D"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        from .errors import DataFormatError

        raise DataFormatError(f"bad realization object: {exc}") from None
    return rlz


def save_realization(rlz: DescriptorRealization, path) -> None:
    Path(path).write_text(json.dumps(realization_to_json(rlz)) + "\n")


def load_realization(path) -> DescriptorRealization:
    from .errors import DataFormatError

    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    return realization_from_json(obj)
