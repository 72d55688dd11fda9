"""Bipartite entanglement measures and one-shot dilution-cost bounds.

Two routes to the entanglement of formation live side by side: the exact
two-qubit closed form through the concurrence, and a numerical search over
pure-state decompositions that works for any total dimension up to 36.  Every
decomposition the search evaluates is feasible, so the numeric value is always
an upper bound on the true infimum; the closed form doubles as its oracle on
two qubits.

The same decomposition search, scored by the exact smooth max-entropy of the
branch ensemble instead of its average entropy, produces one-shot dilution
cost bounds: a certified upper bound (the witness decomposition is returned)
and a heuristic lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import CQState, binary_h
from .linalg import (
    RANK_RTOL,
    DensityMatrix,
    PureState,
    haar_isometry,
    herm_eig,
    numerical_rank,
    partial_trace,
    psd_sqrt,
    trace_norm,
)

MAX_SEARCH_DIM = 36

_YY = np.array([[0, 0, 0, -1],
                [0, 0, 1, 0],
                [0, 1, 0, 0],
                [-1, 0, 0, 0]], dtype=complex)  # sigma_y (x) sigma_y


def max_entangled(d: int) -> PureState:
    """Maximally entangled pure state sum_i |ii> / sqrt(d) on (d, d)."""
    if d < 1:
        raise ValueError("dimension must be positive")
    return PureState((d, d), np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d))


def concurrence_2q(rho: DensityMatrix) -> float:
    """Two-qubit concurrence max{0, l1 - l2 - l3 - l4}.

    The l_i are the decreasing square roots of the eigenvalues of
    ``rho @ spin_flipped(rho)``; they equal the singular values of
    ``sqrt(rho) (sy (x) sy) conj(sqrt(rho))``, which is how they are computed
    here (the singular-value route avoids the square-root blowup of
    eigenvalue noise on rank-deficient states).
    """
    if rho.dims != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got dims {rho.dims}")
    s = psd_sqrt(rho.mat)
    sv = np.linalg.svd(s @ _YY @ s.conj(), compute_uv=False)
    return float(max(0.0, sv[0] - sv[1] - sv[2] - sv[3]))


def eof_2q(rho: DensityMatrix) -> float:
    """Exact two-qubit entanglement of formation from the concurrence."""
    c = concurrence_2q(rho)
    return binary_h(0.5 + 0.5 * math.sqrt(max(0.0, 1.0 - c * c)))


def _schmidt_sq(vec: np.ndarray, da: int, db: int) -> np.ndarray:
    """Squared Schmidt coefficients of a (possibly unnormalized) vector."""
    m = vec.reshape(da, db)
    gram = m @ m.conj().T if da <= db else m.conj().T @ m
    n = gram.shape[0]
    if n == 1:
        return np.array([max(gram[0, 0].real, 0.0)])
    if n == 2:
        a, d = gram[0, 0].real, gram[1, 1].real
        b = gram[0, 1]
        tr = a + d
        disc = max(tr * tr - 4.0 * (a * d - (b.real * b.real + b.imag * b.imag)), 0.0)
        sq = math.sqrt(disc)
        return np.array([0.5 * (tr + sq), max(0.5 * (tr - sq), 0.0)])
    return np.clip(np.linalg.eigvalsh(gram), 0.0, None)


def _branch_objective(sq: np.ndarray) -> float:
    """Weight times marginal entropy of a branch with squared Schmidt vector sq."""
    p = float(sq.sum())
    if p <= 1e-300:
        return 0.0
    w = sq[sq > 0.0]
    return float(-(w * np.log2(w)).sum() + p * math.log2(p))


def eof_pure(psi: PureState) -> float:
    """Entanglement of formation of a pure state: its marginal entropy."""
    if len(psi.dims) != 2:
        raise ValueError(f"expected a bipartite state, got dims {psi.dims}")
    return _branch_objective(_schmidt_sq(psi.vec, *psi.dims))


@dataclass(frozen=True)
class Decomposition:
    """Weighted pure-state ensemble realizing a mixed bipartite target."""

    items: tuple[tuple[float, PureState], ...]
    target: DensityMatrix

    def __post_init__(self):
        items = []
        recon = np.zeros_like(self.target.mat)
        for p, psi in self.items:
            p = float(p)
            if p <= 0.0:
                raise ValueError("decomposition weights must be strictly positive")
            if psi.dims != self.target.dims:
                raise ValueError("decomposition item dims do not match the target")
            recon = recon + p * np.outer(psi.vec, psi.vec.conj())
            items.append((p, psi))
        if not items:
            raise ValueError("a decomposition needs at least one item")
        rank = numerical_rank(np.linalg.eigvalsh(self.target.mat))
        if len(items) > rank * rank:
            raise ValueError(
                f"{len(items)} items exceed the rank-squared cap {rank * rank}")
        if 0.5 * trace_norm(recon - self.target.mat) > 1e-8:
            raise ValueError(
                "decomposition does not reconstruct the target to 1e-8 trace distance")
        object.__setattr__(self, "items", tuple(items))

    def marginal_ensemble(self) -> CQState:
        """The flagged ensemble (p_i, tr_B psi_i) as a CQ state."""
        return CQState(tuple((p, partial_trace(psi.to_density_matrix(), keep=0))
                             for p, psi in self.items))


def eof_cq_conditional(d: Decomposition) -> float:
    """Average marginal entropy sum_i p_i H(A)_{psi_i} of one decomposition.

    This is the objective the decomposition search minimizes.
    """
    return float(sum(p * eof_pure(psi) for p, psi in d.items))


@dataclass(frozen=True)
class EofResult:
    """Outcome of the numerical entanglement-of-formation search."""

    value: float
    decomposition: Decomposition
    restarts_used: int
    converged: bool

    def __post_init__(self):
        if abs(self.value - eof_cq_conditional(self.decomposition)) > 1e-9:
            raise ValueError("result value is inconsistent with its decomposition")


@dataclass(frozen=True)
class OneShotCostBounds:
    """Bounds on the one-shot dilution cost at error eps.

    ``upper`` is certified: ``witness`` is a feasible decomposition achieving
    it.  ``lower`` is heuristic: it is the best value found for the larger
    smoothing budget, but certifying a true lower bound would need the global
    minimum over all decompositions.
    """

    lower: float
    upper: float
    witness: Decomposition


def _line_min(f, lo: float, hi: float, coarse: int, iters: int):
    """Coarse grid scan followed by golden-section refinement.

    Works for scalar or tuple objectives (tuples compare lexicographically).
    Returns the best (x, f(x)) among all evaluated points.
    """
    xs = np.linspace(lo, hi, coarse)
    vals = [f(x) for x in xs]
    j = min(range(coarse), key=vals.__getitem__)
    best_x, best_v = xs[j], vals[j]
    a = xs[j - 1] if j > 0 else xs[0]
    b = xs[j + 1] if j < coarse - 1 else xs[-1]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        for x, v in ((x1, f1), (x2, f2)):
            if v < best_v:
                best_x, best_v = x, v
    return best_x, best_v


class _EnsembleSearch:
    """Shared machinery: decompositions of fixed size as isometry mixings.

    Every size-m decomposition of rho arises from an m x r isometry U acting
    on the spectral ensemble, with unnormalized branch vectors
    ``row_i = sum_j U_ij sqrt(l_j) e_j``.  Local moves are two-branch Givens
    rotations (a real and an imaginary one per pair); branch phases are gauge
    and not searched.
    """

    def __init__(self, rho: DensityMatrix, max_items: int | None):
        if len(rho.dims) != 2:
            raise ValueError(f"expected a bipartite state, got dims {rho.dims}")
        if rho.dim > MAX_SEARCH_DIM:
            raise ValueError(
                f"total dimension {rho.dim} exceeds the search cap {MAX_SEARCH_DIM}")
        self.rho = rho
        self.da, self.db = rho.dims
        w, v = herm_eig(rho.mat)
        self.rank = numerical_rank(w)
        keep = np.clip(w[:self.rank], 0.0, None)
        self.base = (v[:, :self.rank] * np.sqrt(keep)).T  # (rank, D)
        if max_items is None:
            max_items = min(self.rank * self.rank, 2 * self.rank)
        if not self.rank <= max_items <= self.rank * self.rank:
            raise ValueError(
                f"max_items must lie in [{self.rank}, {self.rank * self.rank}]")
        self.m = int(max_items)

    def start_rows(self, restart: int, seed: int, stream: int = 0) -> np.ndarray:
        """Restart 0 is the spectral ensemble itself; later starts are Haar."""
        if restart == 0:
            u = np.zeros((self.m, self.rank), dtype=complex)
            u[:self.rank, :self.rank] = np.eye(self.rank)
        else:
            u = haar_isometry(self.m, self.rank,
                              np.random.default_rng((seed, stream, restart)))
        return u @ self.base

    def _rotated(self, ra, rb, theta: float, phase: complex):
        c, s = math.cos(theta), math.sin(theta)
        return c * ra + (s * phase) * rb, (-s * np.conj(phase)) * ra + c * rb

    # -- average-entropy objective ------------------------------------------

    def _g(self, row: np.ndarray) -> float:
        return _branch_objective(_schmidt_sq(row, self.da, self.db))

    def eof_value(self, rows: np.ndarray) -> float:
        return float(sum(self._g(r) for r in rows))

    def _pair_grams(self, ra: np.ndarray, rb: np.ndarray):
        """Gram pack of a branch pair on the smaller marginal.

        A rotated pair has marginal grams that are quadratic in (cos t, sin t)
        with coefficients A, B and a cross term built from X, so a whole line
        search costs O(small^2) per angle instead of O(D).
        """
        ma = ra.reshape(self.da, self.db)
        mb = rb.reshape(self.da, self.db)
        if self.da <= self.db:
            return ma @ ma.conj().T, mb @ mb.conj().T, ma @ mb.conj().T
        return ma.conj().T @ ma, mb.conj().T @ mb, ma.conj().T @ mb

    def _cross_term(self, x: np.ndarray, phase: complex) -> np.ndarray:
        z = np.conj(phase) * x if self.da <= self.db else phase * x
        return z + z.conj().T

    def _make_line(self, a_g: np.ndarray, b_g: np.ndarray, h: np.ndarray):
        """Objective along the rotation angle, from the gram pack."""
        if a_g.shape[0] == 2:
            a11, a22 = a_g[0, 0].real, a_g[1, 1].real
            a12r, a12i = a_g[0, 1].real, a_g[0, 1].imag
            b11, b22 = b_g[0, 0].real, b_g[1, 1].real
            b12r, b12i = b_g[0, 1].real, b_g[0, 1].imag
            h11, h22 = h[0, 0].real, h[1, 1].real
            h12r, h12i = h[0, 1].real, h[0, 1].imag
            log2 = math.log2
            sqrt = math.sqrt

            def ent2(g11, g22, gr, gi):
                tr = g11 + g22
                if tr <= 1e-300:
                    return 0.0
                disc = tr * tr - 4.0 * (g11 * g22 - gr * gr - gi * gi)
                rt = sqrt(disc) if disc > 0.0 else 0.0
                w1, w2 = 0.5 * (tr + rt), 0.5 * (tr - rt)
                acc = tr * log2(tr)
                if w1 > 0.0:
                    acc -= w1 * log2(w1)
                if w2 > 0.0:
                    acc -= w2 * log2(w2)
                return acc

            def f2(t):
                c, s = math.cos(t), math.sin(t)
                c2, s2, cs = c * c, s * s, c * s
                return (ent2(c2 * a11 + s2 * b11 + cs * h11,
                             c2 * a22 + s2 * b22 + cs * h22,
                             c2 * a12r + s2 * b12r + cs * h12r,
                             c2 * a12i + s2 * b12i + cs * h12i)
                        + ent2(s2 * a11 + c2 * b11 - cs * h11,
                               s2 * a22 + c2 * b22 - cs * h22,
                               s2 * a12r + c2 * b12r - cs * h12r,
                               s2 * a12i + c2 * b12i - cs * h12i))

            return f2

        def fn(t):
            c, s = math.cos(t), math.sin(t)
            c2, s2, cs = c * c, s * s, c * s
            g1 = c2 * a_g + s2 * b_g + cs * h
            g2 = s2 * a_g + c2 * b_g - cs * h
            return (_branch_objective(np.clip(np.linalg.eigvalsh(g1), 0.0, None))
                    + _branch_objective(np.clip(np.linalg.eigvalsh(g2), 0.0, None)))

        return fn

    def local_min_eof(self, rows: np.ndarray, sweeps: int,
                      coarse: int = 9, iters: int = 18) -> tuple[float, np.ndarray]:
        if min(self.da, self.db) == 1:
            return 0.0, rows  # every branch marginal is pure
        g = np.array([self._g(r) for r in rows])
        for _ in range(max(1, sweeps)):
            improved = 0.0
            for a in range(self.m):
                for b in range(a + 1, self.m):
                    pack = self._pair_grams(rows[a], rows[b])
                    for phase in (1.0 + 0.0j, 1.0j):
                        f = self._make_line(pack[0], pack[1],
                                            self._cross_term(pack[2], phase))
                        cur = g[a] + g[b]
                        x, val = _line_min(f, -np.pi / 4, np.pi / 4, coarse, iters)
                        if val < cur - 1e-13:
                            na, nb = self._rotated(rows[a], rows[b], x, phase)
                            rows[a], rows[b] = na, nb
                            g[a], g[b] = self._g(na), self._g(nb)
                            improved += cur - val
                            pack = self._pair_grams(rows[a], rows[b])
            if improved <= 1e-12:
                break
        return float(g.sum()), rows

    # -- smooth max-entropy objective ---------------------------------------

    def _tail(self, row: np.ndarray) -> np.ndarray:
        """Removal-cost profiles of one branch column of the eigenvalue table.

        Row 0..da of column 0 uses rank-clamped eigenvalues (dust below the
        rank threshold is zeroed, making support decisions exact); column 1
        keeps the raw eigenvalues and provides a clamp-free progress signal
        for the tiebreak, so the search cannot chase clamp leakage.
        """
        sq = _schmidt_sq(row, self.da, self.db)
        srt = np.zeros(self.da)
        srt[:sq.size] = np.sort(sq)[::-1][:self.da]
        clamped = np.where(srt > RANK_RTOL * srt.sum(), srt, 0.0)
        tail = np.zeros((self.da + 1, 2))
        tail[:self.da, 0] = clamped[::-1].cumsum()[::-1]
        tail[:self.da, 1] = srt[::-1].cumsum()[::-1]
        return tail

    @staticmethod
    def _score(total: np.ndarray, delta: float) -> tuple[float, float]:
        """(smooth value, raw residual cost to the next support level)."""
        s = int(np.argmax(total[:, 0] <= delta))
        value = math.log2(s) if s > 0 else float("-inf")
        excess = float(total[s - 1, 1] - delta) if s >= 1 else 0.0
        return value, excess

    @staticmethod
    def _better(x, y) -> bool:
        return x[0] < y[0] - 1e-12 or (x[0] < y[0] + 1e-12 and x[1] < y[1] - 1e-13)

    def smooth_value(self, rows: np.ndarray, delta: float) -> float:
        total = sum(self._tail(r) for r in rows)
        return self._score(total, delta)[0]

    def local_min_smooth(self, rows: np.ndarray, delta: float, sweeps: int,
                         coarse: int = 15, iters: int = 16):
        tails = np.stack([self._tail(r) for r in rows], axis=2)
        total = tails.sum(axis=2)
        cur = self._score(total, delta)
        for _ in range(max(1, sweeps)):
            accepted = False
            for a in range(self.m):
                for b in range(a + 1, self.m):
                    for phase in (1.0 + 0.0j, 1.0j):
                        ra, rb = rows[a], rows[b]
                        rest = total - tails[:, :, a] - tails[:, :, b]

                        def f(t):
                            na, nb = self._rotated(ra, rb, t, phase)
                            return self._score(rest + self._tail(na) + self._tail(nb),
                                               delta)

                        x, val = _line_min(f, -np.pi / 4, np.pi / 4, coarse, iters)
                        if self._better(val, cur):
                            na, nb = self._rotated(ra, rb, x, phase)
                            rows[a], rows[b] = na, nb
                            tails[:, :, a] = self._tail(na)
                            tails[:, :, b] = self._tail(nb)
                            total = rest + tails[:, :, a] + tails[:, :, b]
                            cur = self._score(total, delta)
                            accepted = True
            if not accepted:
                break
        return cur, rows

    def decomposition(self, rows: np.ndarray) -> Decomposition:
        items = []
        for row in rows:
            p = float(np.vdot(row, row).real)
            if p < 1e-12:
                continue
            items.append((p, PureState(self.rho.dims, row / math.sqrt(p))))
        return Decomposition(tuple(items), self.rho)


def eof_numeric(rho: DensityMatrix, max_items: int | None = None,
                restarts: int = 20, seed: int = 0, tol: float = 1e-9,
                sweeps: int = 3) -> EofResult:
    """Upper bound on the entanglement of formation by decomposition search.

    Seeded random-restart coordinate descent over Givens rotations of the
    spectral ensemble: ``sweeps`` coordinate sweeps per restart, then the
    best few candidates get polished with further sweeps until they stop
    improving.  Every evaluated decomposition is feasible, so the returned
    value can never undershoot the true infimum.  ``converged`` records
    whether the final restart and polish improved the incumbent by no more
    than ``tol``.  Deterministic for fixed ``seed``; restart streams are
    derived from (seed, restart index).
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    search = _EnsembleSearch(rho, max_items)
    outcomes = []
    prev_best = math.inf
    for i in range(restarts):
        if i == restarts - 1:
            prev_best = min((v for v, _ in outcomes), default=math.inf)
        rows = search.start_rows(i, seed)
        outcomes.append(search.local_min_eof(rows, sweeps))
    outcomes.sort(key=lambda vr: vr[0])
    best_val, best_rows = outcomes[0]
    for _, rows in outcomes[:3]:
        val, rows = search.local_min_eof(rows, sweeps=24)
        if val < best_val:
            best_val, best_rows = val, rows
    decomp = search.decomposition(best_rows)
    value = eof_cq_conditional(decomp)
    converged = restarts >= 2 and (prev_best - best_val) <= tol
    return EofResult(value, decomp, restarts, converged)


def one_shot_cost_bounds(rho: DensityMatrix, eps: float,
                         max_items: int | None = None, restarts: int = 8,
                         seed: int = 0, sweeps: int = 2) -> OneShotCostBounds:
    """Bounds on the one-shot dilution cost of ``rho`` at error ``eps``.

    Searches decompositions minimizing the exact smooth conditional
    max-entropy of the branch ensemble, once per smoothing budget: ``eps/2``
    for the achievable (upper) side and ``2 sqrt(eps)`` for the converse
    (lower) side.  Both bounds are evaluated on the union of all candidate
    decompositions, and the larger budget can only smooth further, so
    ``lower <= upper`` holds by construction.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps {eps} outside [0, 1]")
    search = _EnsembleSearch(rho, max_items)
    delta_up = 0.5 * eps
    delta_low = 2.0 * math.sqrt(eps)
    candidates = []
    for stream, delta in enumerate((delta_up, delta_low)):
        for i in range(max(1, restarts)):
            rows = search.start_rows(i, seed, stream)
            _, rows = search.local_min_smooth(rows, delta, sweeps)
            candidates.append(rows)
    upper, lower, witness_rows = math.inf, math.inf, None
    for rows in candidates:
        vu = search.smooth_value(rows, delta_up)
        lower = min(lower, search.smooth_value(rows, delta_low))
        if vu < upper:
            upper, witness_rows = vu, rows
    return OneShotCostBounds(lower, upper, search.decomposition(witness_rows))
