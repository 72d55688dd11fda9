"""Dense complex linear algebra kernel for small multipartite operators.

Everything in this package runs on plain ``numpy`` complex arrays at total
dimension <= 64, so the kernel favours clarity and strict validation over
asymptotic cleverness.  Conventions fixed here and relied on everywhere else:

- subsystem 0 is the leftmost tensor factor and the slowest-varying index
  (``numpy.kron`` order),
- logarithms are base 2 (see :mod:`entcost.entropy`),
- an eigenvalue counts as nonzero iff it exceeds ``RANK_RTOL * max(lmax, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Global tolerances (absolute unless noted).
HERM_TOL = 1e-10          # max-entry Hermiticity deviation for states
PSD_TOL = 1e-9            # eigenvalues above -PSD_TOL count as nonnegative
TRACE_TOL = 1e-9          # |tr(rho) - 1| for normalized states
NORM_TOL = 1e-10          # |  ||psi|| - 1 | for pure states
RANK_RTOL = 1e-9          # relative rank threshold, see numerical_rank()
EIG_HERM_TOL = 1e-8       # Hermiticity tolerance accepted by herm_eig()


class ValidationError(ValueError):
    """An operator violates a numerical contract beyond tolerance."""


def _as_complex(mat) -> np.ndarray:
    arr = np.array(mat, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError(f"{what} contains non-finite entries")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD operator on a product of finite subsystems.

    Parameters
    ----------
    dims : sequence of int
        Subsystem dimensions, leftmost factor first.
    mat : array_like
        The operator, shape ``(prod(dims), prod(dims))``.
    subnormalized : bool
        When True the trace may be anywhere in (0, 1]; otherwise it must be
        1 within ``TRACE_TOL``.
    """

    dims: tuple[int, ...]
    mat: np.ndarray
    subnormalized: bool = field(default=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValidationError(f"invalid subsystem dimensions {dims}")
        mat = _as_complex(self.mat)
        dim = int(np.prod(dims))
        if mat.shape != (dim, dim):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match dims {dims}")
        _check_finite(mat, "density matrix")
        if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise ValidationError("density matrix is not Hermitian to 1e-10")
        evals = np.linalg.eigvalsh(mat)
        if evals[0] < -PSD_TOL:
            raise ValidationError(
                f"density matrix has eigenvalue {evals[0]:.3e} < -{PSD_TOL}")
        tr = float(mat.trace().real)
        if self.subnormalized:
            if tr > 1.0 + TRACE_TOL:
                raise ValidationError(f"subnormalized state has trace {tr}")
        elif abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"normalized state has trace {tr}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(self.mat.trace().real)


@dataclass(frozen=True)
class PureState:
    """Unit vector on a product of finite subsystems."""

    dims: tuple[int, ...]
    vec: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValidationError(f"invalid subsystem dimensions {dims}")
        vec = _as_complex(self.vec).reshape(-1)
        if vec.shape != (int(np.prod(dims)),):
            raise ValidationError(
                f"vector length {vec.shape[0]} does not match dims {dims}")
        _check_finite(vec, "state vector")
        if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
            raise ValidationError("state vector is not normalized to 1e-10")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "vec", vec)

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def to_density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.vec, self.vec.conj()))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor as the slow (major) index."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _keep_indices(keep, n: int) -> tuple[int, ...]:
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(int(k) for k in keep)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate subsystem indices in {keep}")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"subsystem indices {keep} out of range for {n} factors")
    return tuple(sorted(keep))


def partial_trace_mat(mat: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Partial trace on a raw matrix; kept subsystems stay in original order."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = _keep_indices(keep, n)
    t = np.asarray(mat, dtype=complex).reshape(dims + dims)
    # Trace the discarded factors from the right so earlier axis numbers stay valid.
    traced = 0
    for idx in range(n - 1, -1, -1):
        if idx in keep:
            continue
        cur_n = n - traced
        t = np.trace(t, axis1=idx, axis2=idx + cur_n)
        traced += 1
    d_keep = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduce to the named subsystems; trace is preserved."""
    keep = _keep_indices(keep, len(rho.dims))
    out = partial_trace_mat(rho.mat, rho.dims, keep)
    return DensityMatrix(tuple(rho.dims[k] for k in keep), out,
                         subnormalized=rho.subnormalized)


def partial_transpose_mat(mat: np.ndarray, dims: Sequence[int], sys: int) -> np.ndarray:
    """Transpose one tensor factor of a square operator."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    if sys < 0 or sys >= n:
        raise ValueError(f"subsystem {sys} out of range")
    t = np.asarray(mat, dtype=complex).reshape(dims + dims)
    t = np.swapaxes(t, sys, sys + n)
    d = int(np.prod(dims))
    return t.reshape(d, d)


def herm_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, V)`` with ``h == V @ diag(w) @ V.conj().T`` and the columns
    of ``V`` orthonormal.  Raises :class:`ValidationError` when the input
    deviates from Hermitian by more than 1e-8 in any entry.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > EIG_HERM_TOL:
        raise ValidationError("matrix is not Hermitian to 1e-8")
    w, v = np.linalg.eigh((h + h.conj().T) / 2.0)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def numerical_rank(evals: np.ndarray) -> int:
    """Count eigenvalues above the documented relative threshold.

    An eigenvalue counts as nonzero iff ``lam > RANK_RTOL * max(lmax, 1)``.
    """
    evals = np.asarray(evals, dtype=float)
    if evals.size == 0:
        return 0
    cut = RANK_RTOL * max(float(evals.max()), 1.0)
    return int(np.count_nonzero(evals > cut))


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Square root of a PSD-to-tolerance Hermitian matrix.

    Eigenvalues in [-PSD_TOL, 0) are clamped to 0 so numerical noise cannot
    produce complex roots; anything more negative raises.  Positive eigenvalue
    dust below a few hundred machine epsilons of the largest eigenvalue is
    zeroed too, because the square root would blow such noise up from 1e-16
    to 1e-8.
    """
    w, v = herm_eig(mat)
    if w[-1] < -PSD_TOL:
        raise ValidationError(f"matrix is not PSD: eigenvalue {w[-1]:.3e}")
    w = np.clip(w, 0.0, None)
    if w[0] > 0.0:
        w[w < 2e2 * np.finfo(float).eps * w[0]] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values of a square matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * trace_norm(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Root fidelity || sqrt(rho) sqrt(sigma) ||_1, in [0, 1] for states."""
    if rho.dims != sigma.dims:
        raise ValueError(f"dimension mismatch {rho.dims} vs {sigma.dims}")
    val = trace_norm(psd_sqrt(rho.mat) @ psd_sqrt(sigma.mat))
    return float(min(val, 1.0)) if not (rho.subnormalized or sigma.subnormalized) else float(val)


def purified_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Metric sqrt(1 - Fbar^2) on subnormalized states.

    ``Fbar`` is the generalized fidelity: the root fidelity plus
    ``sqrt((1 - tr rho)(1 - tr sigma))``, which reduces to the plain fidelity
    when either state is normalized.
    """
    if rho.dims != sigma.dims:
        raise ValueError(f"dimension mismatch {rho.dims} vs {sigma.dims}")
    f = trace_norm(psd_sqrt(rho.mat) @ psd_sqrt(sigma.mat))
    gap_r = max(0.0, 1.0 - rho.trace())
    gap_s = max(0.0, 1.0 - sigma.trace())
    fbar = f + np.sqrt(gap_r * gap_s)
    return float(np.sqrt(max(0.0, 1.0 - fbar * fbar)))


def schmidt(psi: PureState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt decomposition of a bipartite pure state.

    Returns ``(coeffs, basis_a, basis_b)`` with ``coeffs`` descending and
    truncated at relative threshold 1e-12, ``basis_a``/``basis_b`` holding the
    matching orthonormal local vectors as columns, and
    ``psi = sum_i coeffs[i] * basis_a[:, i] (x) basis_b[:, i]``.
    """
    if len(psi.dims) != 2:
        raise ValueError(f"expected a bipartite state, got dims {psi.dims}")
    da, db = psi.dims
    m = psi.vec.reshape(da, db)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = int(np.count_nonzero(s > 1e-12 * max(s[0], 1.0))) if s.size else 0
    r = max(r, 1)
    return s[:r].copy(), u[:, :r].copy(), vh[:r, :].T.copy()


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed isometry (rows x cols, orthonormal columns) from Gaussian QR."""
    if cols > rows:
        raise ValueError("isometry needs rows >= cols")
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(dims: Iterable[int], rng: np.random.Generator) -> PureState:
    """Haar-random pure state on the given subsystem dimensions."""
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(dims, v / np.linalg.norm(v))


def random_density_matrix(dims: Iterable[int], rank: int,
                          rng: np.random.Generator) -> DensityMatrix:
    """Random mixed state of the requested rank (Wishart construction)."""
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    if not 1 <= rank <= n:
        raise ValueError(f"rank must lie in [1, {n}]")
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return DensityMatrix(dims, rho / rho.trace().real)
