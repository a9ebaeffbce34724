"""Dense complex linear algebra substrate for small qubit registers.

Everything here works on explicit 2^n x 2^n arrays (n <= 12), which keeps the
code transparent and lets exact eigendecomposition serve as the ground-truth
oracle for the rest of the package.

Bit convention used throughout the package: qubit 0 is the most significant
bit of a computational-basis index, so for n=3 the basis state |011> sits at
index 3 and qubit 0 is the leading '0'.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def num_qubits(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, validating it is 2^n."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def bitstring_to_index(z: str) -> int:
    """Index of basis state |z>, qubit 0 = most significant bit."""
    if not z or any(c not in "01" for c in z):
        raise ValueError(f"not a bitstring: {z!r}")
    return int(z, 2)


def index_to_bitstring(i: int, n: int) -> str:
    """Bitstring of length n for basis index i (qubit 0 = MSB)."""
    if not 0 <= i < 2**n:
        raise ValueError(f"index {i} out of range for {n} qubits")
    return format(i, f"0{n}b")


def all_bitstrings(n: int) -> list[str]:
    """All bitstrings of length n in index (lexicographic) order."""
    return [format(i, f"0{n}b") for i in range(2**n)]


class DensityMatrix:
    """An n-qubit mixed state: Hermitian, positive semidefinite, trace one.

    The underlying array is held read-only.  Validation checks the three
    invariants within fixed absolute tolerances; internal operations that
    preserve them by construction skip the (eigenvalue) check for speed.
    """

    __slots__ = ("n", "data")

    def __init__(self, data: np.ndarray, *, validate: bool = True):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError("density matrix must be square")
        self.n = num_qubits(data.shape[0])
        data.flags.writeable = False
        self.data = data
        if validate:
            self.validate()

    def validate(self) -> None:
        """Raise ValueError if Hermiticity, trace or positivity is violated."""
        d = self.data
        herm = np.abs(d - d.conj().T).max()
        if herm > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = d.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} is not 1 within {TRACE_TOL}")
        wmin = np.linalg.eigvalsh(d).min()
        if wmin < -PSD_TOL:
            raise ValueError(f"negative eigenvalue {wmin:.3e}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def diagonal(self) -> np.ndarray:
        """Real diagonal of rho: standard-basis outcome probabilities."""
        return self.data.diagonal().real.copy()

    @classmethod
    def basis_state(cls, n: int, z: str | int) -> "DensityMatrix":
        """|z><z| for a computational-basis label (bitstring or index)."""
        i = bitstring_to_index(z) if isinstance(z, str) else int(z)
        d = np.zeros((2**n, 2**n), dtype=complex)
        d[i, i] = 1.0
        return cls(d, validate=False)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2**n, dtype=complex) / 2**n, validate=False)

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        return cls(np.outer(psi.amplitudes, psi.amplitudes.conj()), validate=False)

    def __repr__(self) -> str:
        return f"DensityMatrix(n={self.n})"


class PureState:
    """An n-qubit state vector with unit norm."""

    __slots__ = ("n", "amplitudes")

    def __init__(self, amplitudes: np.ndarray, *, validate: bool = True):
        amp = np.array(amplitudes, dtype=complex).reshape(-1)
        self.n = num_qubits(amp.shape[0])
        amp.flags.writeable = False
        self.amplitudes = amp
        if validate:
            nrm = np.linalg.norm(amp)
            if abs(nrm - 1.0) > NORM_TOL:
                raise ValueError(f"norm {nrm} is not 1 within {NORM_TOL}")

    @classmethod
    def basis_state(cls, n: int, z: str | int) -> "PureState":
        i = bitstring_to_index(z) if isinstance(z, str) else int(z)
        amp = np.zeros(2**n, dtype=complex)
        amp[i] = 1.0
        return cls(amp, validate=False)

    def __repr__(self) -> str:
        return f"PureState(n={self.n})"


class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators.

    All operators act on the same k target qubits (k = arity).
    """

    __slots__ = ("operators", "arity")

    def __init__(self, operators, *, validate: bool = True):
        ops = [np.array(k, dtype=complex) for k in operators]
        if not ops:
            raise ValueError("need at least one Kraus operator")
        dim = ops[0].shape[0]
        self.arity = num_qubits(dim)
        if any(k.shape != (dim, dim) for k in ops):
            raise ValueError("Kraus operators must be square and equal-sized")
        self.operators = ops
        if validate:
            s = sum(k.conj().T @ k for k in ops)
            if np.abs(s - np.eye(dim)).max() > HERMITICITY_TOL:
                raise ValueError("channel is not trace preserving: sum K^dag K != I")

    def __repr__(self) -> str:
        return f"KrausChannel(arity={self.arity}, n_ops={len(self.operators)})"


def depolarizing_channel(p: float, arity: int = 1) -> KrausChannel:
    """Depolarizing channel rho -> (1-p) rho + p I/d on `arity` qubits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("depolarizing probability must be in [0, 1]")
    paulis_1q = [PAULI_I, PAULI_X, PAULI_Y, PAULI_Z]
    paulis = paulis_1q
    for _ in range(arity - 1):
        paulis = [np.kron(a, b) for a in paulis for b in paulis_1q]
    d2 = len(paulis)
    ops = [np.sqrt(1.0 - p + p / d2) * paulis[0]]
    ops += [np.sqrt(p / d2) * s for s in paulis[1:]]
    return KrausChannel(ops, validate=False)


def amplitude_damping_channel(gamma: float) -> KrausChannel:
    """Single-qubit amplitude damping: |1><1| decays to |0><0| at rate gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("damping rate must be in [0, 1]")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel([k0, k1], validate=False)


def _check_targets(targets, n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets: {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"target out of range for n={n}: {targets}")
    return targets


def _apply_left(mat: np.ndarray, op: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Return (op embedded on targets) @ mat, contracting only the row indices."""
    k = len(targets)
    cols = mat.shape[1]
    t = mat.reshape((2,) * n + (cols,))
    op_t = op.reshape((2,) * (2 * k))
    out = np.tensordot(op_t, t, axes=(tuple(range(k, 2 * k)), targets))
    return np.moveaxis(out, tuple(range(k)), targets).reshape(2**n, cols)


def _conjugate(mat: np.ndarray, op: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Return (op on targets) mat (op on targets)^dagger without embedding op."""
    out = _apply_left(mat, op, targets, n)
    # right multiplication by op^dag  ==  conjugating rows of mat^dag
    out = _apply_left(out.conj().T, op, targets, n)
    return out.conj().T


def apply_to_vector(vec: np.ndarray, op: np.ndarray, targets, n: int) -> np.ndarray:
    """Apply a k-qubit operator to a state vector on the given target qubits."""
    targets = _check_targets(targets, n)
    return _apply_left(vec.reshape(-1, 1), op, targets, n).reshape(-1)


def apply_unitary(rho: DensityMatrix, u: np.ndarray, targets) -> DensityMatrix:
    """Conjugate rho by a unitary acting on the given target qubits.

    The unitary is embedded by tensor contraction on both sides; the full
    2^n x 2^n operator is never materialized.
    """
    u = np.asarray(u, dtype=complex)
    targets = _check_targets(targets, rho.n)
    dim = 2 ** len(targets)
    if u.shape != (dim, dim):
        raise ValueError(f"operator shape {u.shape} does not match {len(targets)} targets")
    if np.abs(u @ u.conj().T - np.eye(dim)).max() > UNITARITY_TOL:
        raise ValueError("matrix is not unitary")
    return DensityMatrix(_conjugate(rho.data, u, targets, rho.n), validate=False)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, targets) -> DensityMatrix:
    """Apply a Kraus channel to the given target qubits: sum_K K rho K^dag."""
    targets = _check_targets(targets, rho.n)
    if len(targets) != ch.arity:
        raise ValueError(f"channel arity {ch.arity} does not match targets {targets}")
    out = np.zeros_like(rho.data)
    for k in ch.operators:
        out = out + _conjugate(rho.data, k, targets, rho.n)
    return DensityMatrix(out, validate=False)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the kept qubits (trace over the complement).

    `keep` must be a nonempty strict subset of qubit indices; kept qubits
    retain their relative order.
    """
    keep = _check_targets(keep, rho.n)
    if len(keep) == 0:
        raise ValueError("keep set must be nonempty")
    if len(keep) == rho.n:
        raise ValueError("keep set must be a strict subset of the qubits")
    n = rho.n
    traced = [q for q in range(n) if q not in keep]
    t = rho.data.reshape((2,) * (2 * n))
    for q in sorted(traced, reverse=True):
        # row axis q and the matching column axis; column axes shift as rows vanish
        t = np.trace(t, axis1=q, axis2=q + t.ndim // 2)
    d = 2 ** len(keep)
    return DensityMatrix(t.reshape(d, d), validate=False)


def exact_eigs(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Exact spectral decomposition, eigenvalues sorted descending.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns aligned
    with the eigenvalues.  Exactly tied eigenvalues are ordered by the
    lexicographic order of their (phase-fixed) eigenvectors so the output is
    deterministic.  This is the ground-truth oracle that error metrics are
    measured against.
    """
    w, v = np.linalg.eigh(rho.data)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    # fix each eigenvector's global phase: largest-magnitude entry real positive
    idx = np.argmax(np.abs(v), axis=0)
    phases = v[idx, np.arange(v.shape[1])]
    phases = np.where(np.abs(phases) > 0, phases / np.abs(phases), 1.0)
    v = v / phases[None, :]
    # deterministic order inside exactly-degenerate groups
    order = sorted(
        range(len(w)),
        key=lambda i: (-w[i], tuple(np.round(v[:, i].real, 12)), tuple(np.round(v[:, i].imag, 12))),
    )
    w = w[order]
    v = v[:, order]
    if abs(w.sum() - 1.0) > TRACE_TOL:
        raise ValueError(f"eigenvalues sum to {w.sum()}, not 1")
    return w, v


def purity(rho: DensityMatrix) -> float:
    """Tr[rho^2], equal to the sum of squared eigenvalues; 1 iff pure."""
    return float(np.vdot(rho.data, rho.data).real)


def fidelity_pure(rho: DensityMatrix, psi: PureState) -> float:
    """<psi| rho |psi> for a pure reference state."""
    if rho.n != psi.n:
        raise ValueError(f"dimension mismatch: rho has n={rho.n}, psi has n={psi.n}")
    a = psi.amplitudes
    return float(np.vdot(a, rho.data @ a).real)


def random_density_matrix(n: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Random mixed state from a Gaussian factor: A A^dag / Tr, rank-limited."""
    rng = np.random.default_rng(seed)
    d = 2**n
    r = d if rank is None else int(rank)
    a = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = a @ a.conj().T
    return DensityMatrix(m / m.trace(), validate=False)
