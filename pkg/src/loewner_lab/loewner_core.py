"""Loewner-matrix interpolation: pencil construction, rank detection, and
projection to a real descriptor realization.

Given response data split into left points (mu_i, v_i) and right points
(lambda_j, w_j), the Loewner matrix and its shifted companion are the
divided-difference matrices

    Lw[i, j] = (v_i - w_j) / (mu_i - lambda_j),
    Ls[i, j] = (mu_i v_i - lambda_j w_j) / (mu_i - lambda_j).

The raw pencil (-Lw, -Ls) together with the boundary vectors realizes a
rational interpolant of the data; its numerical rank reveals the minimal
order, and truncated singular projectors compress it to that order.  All
realizations are returned with real matrices via the conjugate-pair
transform, assuming each side of the partition keeps conjugate partners
adjacent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .descriptor_ops import DescriptorRealization
from .errors import CoincidentPointError, LoewnerLabError, ZeroDataError
from .freq_data import PointPartition

__all__ = ["LoewnerPencil", "RankReport", "build_pencil", "detect_rank",
           "reduce_to_realization"]

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _pair_transform(points: np.ndarray) -> np.ndarray:
    """Unitary matrix mapping conjugate-pair coordinates to real ones.

    Expects conjugate partners adjacent (z followed by conj(z)); lone
    real-axis points pass through unchanged.  Applying it on both sides of
    a Loewner matrix built from conjugate-symmetric data cancels all
    imaginary parts.
    """
    m = points.size
    T = np.zeros((m, m), dtype=complex)
    i = 0
    while i < m:
        z = points[i]
        if z.imag == 0.0:
            T[i, i] = 1.0
            i += 1
            continue
        if i + 1 >= m or points[i + 1] != np.conj(z):
            raise LoewnerLabError(
                f"point {z} is not followed by its conjugate; the realness "
                "transform needs adjacent conjugate pairs"
            )
        T[i, i] = _INV_SQRT2
        T[i + 1, i] = _INV_SQRT2
        T[i, i + 1] = 1j * _INV_SQRT2
        T[i + 1, i + 1] = -1j * _INV_SQRT2
        i += 2
    return T


def _drop_imag(name: str, M: np.ndarray) -> np.ndarray:
    resid = float(np.max(np.abs(M.imag), initial=0.0))
    scale = float(np.max(np.abs(M.real), initial=0.0))
    if resid > 1e-8 * max(1.0, scale):
        raise LoewnerLabError(
            f"realness transform of {name} left imaginary residue {resid:g}; "
            "data is not conjugate-symmetric"
        )
    return np.ascontiguousarray(M.real)


@dataclass
class LoewnerPencil:
    """Loewner matrix pair plus its generating partition.

    Real-transformed forms and their singular value decompositions are
    computed lazily and cached, since rank detection and projection reuse
    the same factorizations.
    """

    loewner: np.ndarray
    shifted: np.ndarray
    partition: PointPartition
    _real: tuple | None = field(default=None, repr=False, compare=False)
    _svd_row: tuple | None = field(default=None, repr=False, compare=False)
    _svd_col: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.loewner.shape[0]

    def real_forms(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Real Loewner/shifted matrices and boundary vectors.

        Returns (Lw_r, Ls_r, v_r, w_r) where the unitary conjugate-pair
        transform has been applied on both sides and the (numerically
        negligible) imaginary residue dropped.
        """
        if self._real is None:
            Tl = _pair_transform(self.partition.left_points)
            Tr = _pair_transform(self.partition.right_points)
            TlH = Tl.conj().T
            Lw_r = _drop_imag("Loewner matrix", TlH @ self.loewner @ Tr)
            Ls_r = _drop_imag("shifted Loewner matrix", TlH @ self.shifted @ Tr)
            v_r = _drop_imag("left responses", TlH @ self.partition.left_values)
            w_r = _drop_imag("right responses", self.partition.right_values @ Tr)
            self._real = (Lw_r, Ls_r, v_r, w_r)
        return self._real

    def svd_row_stack(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """SVD of the horizontal stack [Lw  Ls] (real form)."""
        if self._svd_row is None:
            Lw_r, Ls_r, _, _ = self.real_forms()
            self._svd_row = np.linalg.svd(
                np.hstack([Lw_r, Ls_r]), full_matrices=False
            )
        return self._svd_row

    def svd_col_stack(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """SVD of the vertical stack [Lw; Ls] (real form)."""
        if self._svd_col is None:
            Lw_r, Ls_r, _, _ = self.real_forms()
            self._svd_col = np.linalg.svd(
                np.vstack([Lw_r, Ls_r]), full_matrices=False
            )
        return self._svd_col


@dataclass(frozen=True)
class RankReport:
    """Numerical-rank evidence for a Loewner pencil.

    Holds the singular values of the row stack [Lw Ls], the column stack
    [Lw; Ls], and of shifted pencils z*Lw - Ls at a few probe points drawn
    from the data, together with the detected rank under the absolute
    threshold.
    """

    rank: int
    tol: float
    singular_values_row: np.ndarray
    singular_values_col: np.ndarray
    shifted_pencil: tuple[tuple[complex, np.ndarray], ...]
    rank_row: int
    rank_col: int
    ranks_agree: bool


def build_pencil(p: PointPartition) -> LoewnerPencil:
    """Assemble the Loewner and shifted-Loewner matrices entrywise."""
    mu = p.left_points
    lam = p.right_points
    v = p.left_values
    w = p.right_values
    denom = mu[:, None] - lam[None, :]
    zscale = float(np.max(np.abs(np.concatenate([mu, lam])), initial=0.0))
    if np.any(np.abs(denom) <= 1e-14 * max(zscale, 1e-300)):
        i, j = np.unravel_index(
            int(np.argmin(np.abs(denom))), denom.shape
        )
        raise CoincidentPointError(
            f"left point {mu[i]} coincides with right point {lam[j]}"
        )
    Lw = (v[:, None] - w[None, :]) / denom
    Ls = (mu[:, None] * v[:, None] - lam[None, :] * w[None, :]) / denom
    return LoewnerPencil(loewner=Lw, shifted=Ls, partition=p)


def detect_rank(
    pen: LoewnerPencil, tol: float = 1e-10, shifted_probes: int = 3
) -> RankReport:
    """Numerical rank of the pencil family under an SVD cutoff.

    The rank is the count of singular values of [Lw Ls] above ``tol``.
    The cutoff is absolute, as in MATLAB's ``rank(A, tol)``: response data
    of order-one magnitude produces Loewner matrices whose noise-floor
    singular values sit at machine scale, so a small absolute threshold
    separates signal from rounding noise regardless of how slowly the
    signal spectrum decays.  (A threshold proportional to sigma_max
    misreads slowly decaying spectra from irrational models, whose
    meaningful singular values span many decades.)

    The column stack must agree with the row stack; a disagreement
    (possible with noisy or feed-through-bearing data) takes the larger
    count with a warning.  ``shifted_probes`` additional singular spectra
    of z*Lw - Ls at points drawn from the data are recorded as evidence.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tol}")
    s_row = pen.svd_row_stack()[1]
    s_col = pen.svd_col_stack()[1]
    if s_row[0] == 0.0:
        raise ZeroDataError("Loewner pencil is identically zero")
    rank_row = int(np.sum(s_row > tol))
    rank_col = int(np.sum(s_col > tol))
    agree = rank_row == rank_col
    if not agree:
        warnings.warn(
            f"rank mismatch between row stack ({rank_row}) and column stack "
            f"({rank_col}); taking the larger",
            stacklevel=2,
        )
    probes: list[tuple[complex, np.ndarray]] = []
    if shifted_probes > 0:
        Lw_r, Ls_r, _, _ = pen.real_forms()
        mu = pen.partition.left_points
        lam = pen.partition.right_points
        candidates = [mu[0], lam[lam.size // 2], mu[-1]]
        for z in candidates[: int(shifted_probes)]:
            sv = np.linalg.svd(z * Lw_r - Ls_r, compute_uv=False)
            probes.append((complex(z), sv))
    return RankReport(
        rank=max(rank_row, rank_col),
        tol=tol,
        singular_values_row=s_row,
        singular_values_col=s_col,
        shifted_pencil=tuple(probes),
        rank_row=rank_row,
        rank_col=rank_col,
        ranks_agree=agree,
    )


def reduce_to_realization(pen: LoewnerPencil, r: int) -> DescriptorRealization:
    """Project the raw Loewner realization to order ``r``.

    Y spans the first r left singular directions of the row stack [Lw Ls]
    and X the first r right singular directions of the column stack
    [Lw; Ls]; the projected realization is

        E = -Y' Lw X,  A = -Y' Ls X,  B = Y' v,  C = w X,  D = 0,

    all in the real-transformed coordinates, so the output matrices are
    real.  At the detected rank the realization interpolates the data; at
    full rank the interpolation is exact up to conditioning.
    """
    m = pen.size
    if not 1 <= r <= m:
        raise ValueError(f"target order must lie in [1, {m}], got {r}")
    Lw_r, Ls_r, v_r, w_r = pen.real_forms()
    Y = pen.svd_row_stack()[0][:, :r]
    X = pen.svd_col_stack()[2][:r, :].T
    E = -(Y.T @ Lw_r @ X)
    A = -(Y.T @ Ls_r @ X)
    B = (Y.T @ v_r).reshape(r, 1)
    C = (w_r @ X).reshape(1, r)
    return DescriptorRealization(E=E, A=A, B=B, C=C, D=0.0)
