"""Dense linear-algebra and Gaussian-sampling substrate.

Everything here is deterministic: factorizations are plain LAPACK-backed
computations, and random draws come from :class:`RngStream`, which turns a
``(seed, stream_id)`` pair into a reproducible sequence of standard normals.
Normals are produced by inverse-CDF transform of 53-bit uniforms from PCG64
(one 64-bit word per normal), so the stream position is easy to reason about:
drawing ``n`` normals always consumes exactly ``n`` words, independent of the
block shapes used to request them.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtri

# Default tolerances. Callers may override per call; these values are the
# build-wide contract.
SYMMETRY_TOL = 1e-10
PIVOT_REL_TOL = 1e-12
PSD_CLAMP_REL_TOL = 1e-12
SVD_RANK_REL_TOL = 1e-10
ZERO_MATRIX_TOL = 1e-14
GRAM_SCHMIDT_TOL = 1e-10
SIGN_EPS = 1e-12


class NotPositiveDefinite(ValueError):
    """Matrix failed a (semi)definite factorization."""


class ZeroMatrix(ValueError):
    """All entries below the zero-detection tolerance."""


class RankDeficient(ValueError):
    """Rows are linearly dependent where full row rank is required."""


class DimensionMismatch(ValueError):
    """Operand shapes are incompatible."""


class RngStream:
    """Reproducible stream of standard normals keyed by (seed, stream_id).

    Identical ``(seed, stream_id)`` pairs yield identical sequences; distinct
    stream ids give statistically independent streams (PCG64 seeded through
    ``SeedSequence(seed, spawn_key=(stream_id,))``). The object is stateful
    and single-owner: never share one stream between concurrent workers.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be nonnegative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,)))
        )

    def standard_normals(self, shape: int | tuple[int, ...]) -> np.ndarray:
        """Draw standard normals via inverse CDF of 53-bit uniforms."""
        bits = self._gen.integers(0, 1 << 53, size=shape, dtype=np.int64)
        u = (bits.astype(np.float64) + 0.5) * 2.0**-53
        return ndtri(u)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={a.ndim}")
    return a


def _check_symmetric(a: np.ndarray, tol: float) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if not np.all(np.abs(a - a.T) <= tol * scale):
        raise NotPositiveDefinite("matrix is not symmetric")


def cholesky(m, *, sym_tol: float = SYMMETRY_TOL, pivot_tol: float = PIVOT_REL_TOL) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    Raises :class:`NotPositiveDefinite` if the matrix is asymmetric or any
    pivot falls at or below ``pivot_tol`` times the largest diagonal entry.
    """
    a = _as_matrix(m)
    _check_symmetric(a, sym_tol)
    threshold = pivot_tol * float(np.max(np.diag(a))) if a.size else 0.0
    try:
        L = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    # LAPACK succeeded; enforce the pivot threshold (pivots are diag(L)^2).
    if np.min(np.diag(L)) ** 2 <= threshold:
        raise NotPositiveDefinite("pivot below positive-definiteness threshold")
    return L


def cholesky_psd(m, *, sym_tol: float = SYMMETRY_TOL, clamp_tol: float = PSD_CLAMP_REL_TOL) -> np.ndarray:
    """Factor a symmetric PSD matrix as L @ L.T with diagonal pivoting.

    Pivots at or below ``clamp_tol`` times the largest initial diagonal entry
    are clamped to zero, so rank-deficient covariances (including the zero
    matrix) factor cleanly. The returned L is not triangular in general, only
    a valid square root. Indefinite input raises :class:`NotPositiveDefinite`.
    """
    a = _as_matrix(m).copy()
    _check_symmetric(a, sym_tol)
    n = a.shape[0]
    max_diag = float(np.max(np.diag(a))) if n else 0.0
    if max_diag < 0.0:
        raise NotPositiveDefinite("negative diagonal entry in PSD factorization")
    threshold = clamp_tol * max_diag
    L = np.zeros((n, n))
    perm = np.arange(n)
    for j in range(n):
        d = np.diag(a)
        p = j + int(np.argmax(d[j:]))
        if p != j:
            a[[j, p], :] = a[[p, j], :]
            a[:, [j, p]] = a[:, [p, j]]
            L[[j, p], :j] = L[[p, j], :j]
            perm[[j, p]] = perm[[p, j]]
        pivot = a[j, j]
        if pivot <= threshold:
            # Remaining block must be numerically zero for a PSD matrix.
            if np.min(np.diag(a)[j:]) < -max(threshold, sym_tol * max(1.0, max_diag)):
                raise NotPositiveDefinite("matrix is indefinite")
            break
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1 :, j] = a[j + 1 :, j] / L[j, j]
            a[j + 1 :, j + 1 :] -= np.outer(L[j + 1 :, j], L[j + 1 :, j])
    out = np.zeros_like(L)
    out[perm] = L
    return out


def solve_spd(m, b) -> np.ndarray:
    """Solve m @ x = b for symmetric positive-definite m."""
    a = _as_matrix(m)
    rhs = np.asarray(b, dtype=np.float64)
    if rhs.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"rhs length {rhs.shape[0]} != matrix size {a.shape[0]}")
    L = cholesky(a)
    y = solve_triangular(L, rhs, lower=True)
    return solve_triangular(L.T, y, lower=False)


def projection_onto_columns(m, *, rank_tol: float = SVD_RANK_REL_TOL, zero_tol: float = ZERO_MATRIX_TOL) -> np.ndarray:
    """Orthogonal projection onto the column space of m.

    Rank is decided by a singular-value threshold relative to the largest
    singular value. Raises :class:`ZeroMatrix` for an (effectively) zero input.
    """
    a = _as_matrix(m)
    if a.size == 0 or np.max(np.abs(a)) < zero_tol:
        raise ZeroMatrix("cannot project onto the column space of a zero matrix")
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    r = int(np.sum(s > rank_tol * s[0]))
    basis = u[:, :r]
    return basis @ basis.T


def orthonormalize_rows(m, *, residual_tol: float = GRAM_SCHMIDT_TOL) -> np.ndarray:
    """Orthonormal basis of the row space, via modified Gram-Schmidt.

    Requires full row rank (rows <= cols). Each output row is sign-normalized
    so its first entry larger than ``SIGN_EPS`` in magnitude is positive,
    making results deterministic.
    """
    a = _as_matrix(m)
    rows, cols = a.shape
    if rows > cols:
        raise RankDeficient(f"cannot orthonormalize {rows} rows in {cols} dimensions")
    q = a.astype(np.float64, copy=True)
    for i in range(rows):
        for _ in range(2):  # second pass keeps orthogonality near machine precision
            if i:
                q[i] -= q[:i].T @ (q[:i] @ q[i])
        nrm = np.linalg.norm(q[i])
        if nrm < residual_tol:
            raise RankDeficient(f"row {i} is linearly dependent on earlier rows")
        q[i] /= nrm
    return _fix_row_signs(q)


def _fix_row_signs(q: np.ndarray) -> np.ndarray:
    for i in range(q.shape[0]):
        big = np.nonzero(np.abs(q[i]) > SIGN_EPS)[0]
        if big.size and q[i, big[0]] < 0:
            q[i] = -q[i]
    return q


def mvn_sample(mean, cov, rng: RngStream, size: int | None = None) -> np.ndarray:
    """Sample from N(mean, cov) with cov symmetric PSD.

    Returns a vector, or a ``(size, dim)`` array when ``size`` is given (rows
    are consecutive draws; normals are consumed row-major). A zero covariance
    returns the mean exactly while still consuming draws, so degenerate and
    nondegenerate runs stay aligned on the stream.
    """
    mu = np.asarray(mean, dtype=np.float64)
    a = _as_matrix(cov)
    if mu.ndim != 1 or mu.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"mean dim {mu.shape} incompatible with cov {a.shape}")
    try:
        L = cholesky(a)
    except NotPositiveDefinite:
        L = cholesky_psd(a)
    if size is None:
        z = rng.standard_normals(mu.shape[0])
        return mu + L @ z
    z = rng.standard_normals((size, mu.shape[0]))
    return mu + z @ L.T
