"""Quantum channel representations and the standard qubit noise models.

Channels live in Kraus form; the Choi state uses the normalized convention
``(E (x) I)(phi)`` with ``phi`` maximally entangled, so it is a density
matrix on ``[dim_out, dim_in]`` (output factor first) and feeds directly
into the two-qubit concurrence machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DensityMatrix,
    ValidationError,
    haar_isometry,
    herm_eig,
    numerical_rank,
    partial_trace_mat,
    partial_transpose_mat,
    trace_norm,
)

COMPLETENESS_TOL = 1e-9   # max-entry deviation of sum K^dag K from identity
PPT_TOL = 1e-9            # partial-transpose eigenvalues above -PPT_TOL count PSD
MAX_CHANNEL_DIM = 64      # dim_in * dim_out cap

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class SchemaError(ValueError):
    """A channel or state description violates the wire format."""


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map given by Kraus operators of shape (dim_out, dim_in)."""

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        din, dout = int(self.dim_in), int(self.dim_out)
        if din < 1 or dout < 1:
            raise ValueError("channel dimensions must be positive")
        if din * dout > MAX_CHANNEL_DIM:
            raise ValueError(f"dim_in * dim_out must not exceed {MAX_CHANNEL_DIM}")
        ops = []
        for k in self.kraus:
            arr = np.array(k, dtype=complex)
            if arr.shape != (dout, din):
                raise ValueError(
                    f"Kraus operator shape {arr.shape}, expected {(dout, din)}")
            if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
                raise ValidationError("Kraus operator has non-finite entries")
            arr.setflags(write=False)
            ops.append(arr)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        acc = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(acc - np.eye(din))) > COMPLETENESS_TOL:
            raise ValidationError(
                "Kraus operators violate completeness beyond 1e-9")
        object.__setattr__(self, "dim_in", din)
        object.__setattr__(self, "dim_out", dout)
        object.__setattr__(self, "kraus", tuple(ops))


@dataclass(frozen=True)
class ChoiState:
    """Choi state of a channel: PSD, trace 1, input marginal maximally mixed."""

    dim_in: int
    dim_out: int
    state: DensityMatrix

    def __post_init__(self):
        din, dout = int(self.dim_in), int(self.dim_out)
        if self.state.dims != (dout, din):
            raise ValueError(
                f"Choi state dims {self.state.dims}, expected {(dout, din)}")
        marg = partial_trace_mat(self.state.mat, self.state.dims, keep=1)
        if np.max(np.abs(marg - np.eye(din) / din)) > 1e-9:
            raise ValidationError(
                "Choi input marginal deviates from I/dim_in beyond 1e-9")
        object.__setattr__(self, "dim_in", din)
        object.__setattr__(self, "dim_out", dout)


def _lifted_kraus(ch: KrausChannel, anc_dim: int) -> list[np.ndarray]:
    if anc_dim == 1:
        return list(ch.kraus)
    eye = np.eye(anc_dim)
    return [np.kron(k, eye) for k in ch.kraus]


def apply_mat(ch: KrausChannel, mat: np.ndarray, anc_dim: int = 1) -> np.ndarray:
    """Apply the channel (tensored with an ancilla identity) to a raw matrix."""
    out = None
    for k in _lifted_kraus(ch, anc_dim):
        term = k @ mat @ k.conj().T
        out = term if out is None else out + term
    return out


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply the channel to subsystem 0 of ``rho``; other factors pass through."""
    if rho.dims[0] != ch.dim_in:
        raise ValueError(
            f"channel input dimension {ch.dim_in} does not match subsystem 0 of {rho.dims}")
    anc = int(np.prod(rho.dims[1:])) if len(rho.dims) > 1 else 1
    out = apply_mat(ch, rho.mat, anc)
    return DensityMatrix((ch.dim_out,) + rho.dims[1:], out,
                         subnormalized=rho.subnormalized)


def choi(ch: KrausChannel) -> ChoiState:
    """Choi state (E (x) I)(phi) with phi maximally entangled on the input."""
    d = ch.dim_in
    vec = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    phi = np.outer(vec, vec.conj())
    mat = apply_mat(ch, phi, anc_dim=d)
    return ChoiState(d, ch.dim_out, DensityMatrix((ch.dim_out, d), mat))


def kraus_from_choi(c: ChoiState) -> KrausChannel:
    """Canonical Kraus form from the Choi eigenvectors.

    One operator per eigenvalue above the rank threshold, so the operator
    count equals the numerical rank of the Choi state.
    """
    w, v = herm_eig(c.state.mat)
    r = numerical_rank(w)
    if r == 0:
        raise ValidationError("Choi state has numerical rank 0")
    ops = []
    for i in range(r):
        k = np.sqrt(c.dim_in * w[i]) * v[:, i].reshape(c.dim_out, c.dim_in)
        ops.append(k)
    return KrausChannel(c.dim_in, c.dim_out, tuple(ops))


def identity(d: int = 2) -> KrausChannel:
    """Identity channel on a d-dimensional system."""
    return KrausChannel(d, d, (np.eye(d, dtype=complex),))


def dephasing(p: float) -> KrausChannel:
    """Qubit dephasing rho -> (1-p) rho + p Z rho Z."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing parameter {p} outside [0, 1]")
    return KrausChannel(2, 2, (np.sqrt(1.0 - p) * np.eye(2, dtype=complex),
                               np.sqrt(p) * SIGMA_Z))


def depolarizing(r: float) -> KrausChannel:
    """Qubit depolarizing rho -> (1-r) rho + r I/2 (r=1 is the constant channel)."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"depolarizing parameter {r} outside [0, 1]")
    return KrausChannel(2, 2, (np.sqrt(1.0 - 0.75 * r) * np.eye(2, dtype=complex),
                               np.sqrt(0.25 * r) * SIGMA_X,
                               np.sqrt(0.25 * r) * SIGMA_Y,
                               np.sqrt(0.25 * r) * SIGMA_Z))


def amplitude_damping(r: float) -> KrausChannel:
    """Qubit amplitude damping with survival amplitude sqrt(r) on |1>.

    Kraus operators diag(1, sqrt(r)) and sqrt(1-r) |0><1|, so r=1 is the
    identity and r=0 measures and resets to |0>.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"amplitude damping parameter {r} outside [0, 1]")
    e0 = np.array([[1.0, 0.0], [0.0, np.sqrt(r)]], dtype=complex)
    e1 = np.array([[0.0, np.sqrt(1.0 - r)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(2, 2, (e0, e1))


def is_entanglement_breaking_qubit(ch: KrausChannel) -> bool:
    """PPT test on the Choi state; exact for qubit-to-qubit channels.

    In 2x2 the positive partial transpose criterion characterizes
    separability, and a separable Choi state is equivalent to the channel
    breaking all entanglement.
    """
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise ValueError("entanglement breaking test supports 2 -> 2 channels only")
    c = choi(ch)
    pt = partial_transpose_mat(c.state.mat, c.state.dims, sys=1)
    evals = np.linalg.eigvalsh((pt + pt.conj().T) / 2.0)
    return bool(evals[0] >= -PPT_TOL)


def _sign_operator(mat: np.ndarray) -> np.ndarray:
    w, v = herm_eig(mat)
    return (v * np.sign(w)) @ v.conj().T


def channel_distance_heuristic(a: KrausChannel, b: KrausChannel,
                               restarts: int = 8, seed: int = 0,
                               iters: int = 60) -> float:
    """Seeded lower bound on the diamond-norm distance between two channels.

    Maximizes || ((a - b) (x) I)(psi) ||_1 over pure inputs with a reference
    system of the input dimension by alternating ascent: the trace-norm dual
    witness for the current output, then the top eigenvector of the pulled
    back witness.  Every iterate is a feasible input, so the running maximum
    is a certified lower bound on the diamond norm, nondecreasing in
    ``restarts``, and deterministic for a fixed seed.
    """
    if a.dim_in != b.dim_in or a.dim_out != b.dim_out:
        raise ValueError("channels must share input and output dimensions")
    d = a.dim_in
    ka = _lifted_kraus(a, d)
    kb = _lifted_kraus(b, d)

    def delta(x):
        out = None
        for k in ka:
            t = k @ x @ k.conj().T
            out = t if out is None else out + t
        for k in kb:
            out = out - k @ x @ k.conj().T
        return out

    def delta_adj(w):
        out = None
        for k in ka:
            t = k.conj().T @ w @ k
            out = t if out is None else out + t
        for k in kb:
            out = out - k.conj().T @ w @ k
        return out

    def ascend(psi):
        best = 0.0
        for _ in range(iters):
            x = delta(np.outer(psi, psi.conj()))
            val = trace_norm(x)
            if val <= best + 1e-12:
                return max(best, val)
            best = val
            m = delta_adj(_sign_operator(x))
            w, v = herm_eig(m)
            psi = v[:, 0]
        return best

    # Restart 0 is the maximally entangled input; the rest are Haar samples,
    # each on its own (seed, restart) stream.
    best = ascend(np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d))
    for i in range(1, max(1, restarts)):
        rng = np.random.default_rng((seed, i))
        psi = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
        best = max(best, ascend(psi / np.linalg.norm(psi)))
    return best


def random_channel(dim_in: int, dim_out: int, kraus_count: int,
                   rng: np.random.Generator) -> KrausChannel:
    """Haar-random channel from a random Stinespring isometry."""
    v = haar_isometry(dim_out * kraus_count, dim_in, rng)
    ops = tuple(v[i * dim_out:(i + 1) * dim_out, :] for i in range(kraus_count))
    return KrausChannel(dim_in, dim_out, ops)


def choi_distance(a: ChoiState, b: ChoiState) -> float:
    """Trace distance between two Choi states of equal dimensions."""
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise ValueError("Choi states live on different spaces")
    return 0.5 * trace_norm(a.state.mat - b.state.mat)


_FAMILIES = {
    "identity": identity,
    "dephasing": dephasing,
    "depolarizing": depolarizing,
    "amplitude_damping": amplitude_damping,
}


def channel_from_json(obj) -> KrausChannel:
    """Build a channel from its wire-format description.

    Accepted forms: ``{"type": "identity", "d": 2}``,
    ``{"type": "dephasing", "p": 0.3}``, ``{"type": "depolarizing", "r": 0.5}``,
    ``{"type": "amplitude_damping", "r": 0.5}``, and
    ``{"type": "kraus", "dim_in": 2, "dim_out": 2, "ops": [...]}`` where each
    operator is a row-major flat list of ``[re, im]`` pairs.

    Malformed descriptions raise :class:`SchemaError`; well-formed operator
    lists that fail completeness raise :class:`ValidationError`.
    """
    if not isinstance(obj, dict):
        raise SchemaError("channel description must be a JSON object")
    kind = obj.get("type")
    if kind == "identity":
        d = obj.get("d")
        if not isinstance(d, int) or d < 1:
            raise SchemaError("identity channel needs a positive integer 'd'")
        if d * d > MAX_CHANNEL_DIM:
            raise SchemaError(f"identity dimension {d} exceeds the supported range")
        return identity(d)
    if kind in ("dephasing", "depolarizing", "amplitude_damping"):
        key = "p" if kind == "dephasing" else "r"
        val = obj.get(key)
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise SchemaError(f"{kind} channel needs a numeric '{key}'")
        if not 0.0 <= float(val) <= 1.0:
            raise SchemaError(f"{kind} parameter {val} outside [0, 1]")
        return _FAMILIES[kind](float(val))
    if kind == "kraus":
        din, dout = obj.get("dim_in"), obj.get("dim_out")
        ops = obj.get("ops")
        if not isinstance(din, int) or not isinstance(dout, int) or din < 1 or dout < 1:
            raise SchemaError("kraus channel needs positive integer dim_in and dim_out")
        if din * dout > MAX_CHANNEL_DIM:
            raise SchemaError("dim_in * dim_out exceeds the supported range")
        if not isinstance(ops, list) or not ops:
            raise SchemaError("kraus channel needs a nonempty 'ops' list")
        mats = []
        for op in ops:
            if not isinstance(op, list) or len(op) != din * dout:
                raise SchemaError(
                    f"each operator must list {din * dout} [re, im] entries row-major")
            entries = []
            for pair in op:
                if (not isinstance(pair, list) or len(pair) != 2
                        or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                   for x in pair)):
                    raise SchemaError("operator entries must be [re, im] number pairs")
                entries.append(complex(pair[0], pair[1]))
            mats.append(np.array(entries, dtype=complex).reshape(dout, din))
        return KrausChannel(din, dout, tuple(mats))
    raise SchemaError(f"unknown channel type {kind!r}")
