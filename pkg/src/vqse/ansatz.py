"""Layered hardware-efficient circuit ansatz and eigenvector preparation.

A circuit is a brick pattern of two-qubit blocks: every layer places blocks
on pairs (0,1), (2,3), ... and then on pairs (1,2), (3,4), ...; for odd n the
last qubit idles in one of the rows.  Two block parameterizations are
supported:

* ``RY_CZ``: a CZ preceded and followed by one y-rotation per wire (4 angles);
* ``G_CNOT_G``: a CNOT preceded and followed by one general single-qubit
  rotation G per wire (12 angles).

Rotation convention (half-angle): R_k(theta) = exp(i theta sigma_k / 2) and
G(a, b, c) = R_z(c) R_y(b) R_z(a).  Under this convention every angle enters
through a half-angle Pauli generator, so the +-pi/2 parameter-shift rule used
by the optimizer is exact.  Global phases are considered irrelevant; compare
unitaries via |Tr(U^dag W)| / 2^n and states via fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .qmath import (
    DensityMatrix,
    PureState,
    apply_to_vector,
    bitstring_to_index,
    _conjugate,
    _apply_left,
)

CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
# control = first target qubit (the gate's most significant index bit)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def rotation_y(theta: float) -> np.ndarray:
    """R_y(theta) = exp(i theta sigma_y / 2)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rotation_z(theta: float) -> np.ndarray:
    """R_z(theta) = exp(i theta sigma_z / 2)."""
    return np.diag([np.exp(1j * theta / 2), np.exp(-1j * theta / 2)])


def g_rotation(a: float, b: float, c: float) -> np.ndarray:
    """General single-qubit rotation G(a, b, c) = R_z(c) R_y(b) R_z(a)."""
    return rotation_z(c) @ rotation_y(b) @ rotation_z(a)


class BlockKind(Enum):
    RY_CZ = "rycz"
    G_CNOT_G = "gcnotg"

    @property
    def angles_per_block(self) -> int:
        return 4 if self is BlockKind.RY_CZ else 12

    @classmethod
    def parse(cls, name: str) -> "BlockKind":
        for kind in cls:
            if kind.value == name.strip().lower():
                return kind
        raise ValueError(f"unknown block kind {name!r} (expected rycz or gcnotg)")


def brick_pairs(n: int) -> list[tuple[int, int]]:
    """Qubit pairs of one layer: the even row then the odd row."""
    if n < 2:
        raise ValueError("need at least 2 qubits for two-qubit blocks")
    even = [(i, i + 1) for i in range(0, n - 1, 2)]
    odd = [(i, i + 1) for i in range(1, n - 1, 2)]
    return even + odd


def block_unitary(kind: BlockKind, angles: np.ndarray) -> np.ndarray:
    """4x4 unitary of one block; wire order (pair[0], pair[1]) = (MSB, LSB)."""
    if kind is BlockKind.RY_CZ:
        pre = np.kron(rotation_y(angles[0]), rotation_y(angles[1]))
        post = np.kron(rotation_y(angles[2]), rotation_y(angles[3]))
        return post @ CZ @ pre
    pre = np.kron(g_rotation(*angles[0:3]), g_rotation(*angles[3:6]))
    post = np.kron(g_rotation(*angles[6:9]), g_rotation(*angles[9:12]))
    return post @ CNOT @ pre


@dataclass(frozen=True)
class LayeredAnsatz:
    """Brick-pattern circuit V(theta) with a flat parameter vector.

    theta is ordered block by block, blocks ordered layer by layer with the
    even row before the odd row inside each layer.
    """

    n: int
    layers: int
    kind: BlockKind
    theta: np.ndarray

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be positive")
        theta = np.array(self.theta, dtype=float).reshape(-1)
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        expected = self.n_parameters(self.n, self.layers, self.kind)
        if theta.size != expected:
            raise ValueError(
                f"theta has {theta.size} entries, structure requires {expected}"
            )

    @staticmethod
    def n_parameters(n: int, layers: int, kind: BlockKind) -> int:
        return kind.angles_per_block * layers * len(brick_pairs(n))

    @classmethod
    def random(cls, n: int, layers: int, kind: BlockKind, rng) -> "LayeredAnsatz":
        """Fresh ansatz with angles drawn uniformly from [-pi, pi)."""
        rng = np.random.default_rng(rng)
        p = cls.n_parameters(n, layers, kind)
        return cls(n, layers, kind, rng.uniform(-np.pi, np.pi, p))

    @property
    def block_pairs(self) -> list[tuple[int, int]]:
        return brick_pairs(self.n) * self.layers

    @property
    def n_blocks(self) -> int:
        return self.layers * len(brick_pairs(self.n))

    def block_angles(self, b: int) -> np.ndarray:
        w = self.kind.angles_per_block
        return self.theta[b * w : (b + 1) * w]

    def block_matrices(self) -> list[np.ndarray]:
        return [block_unitary(self.kind, self.block_angles(b)) for b in range(self.n_blocks)]

    def param_block(self, index: int) -> int:
        """Block owning parameter `index`."""
        if not 0 <= index < self.theta.size:
            raise ValueError(f"parameter index {index} out of range")
        return index // self.kind.angles_per_block


def shift_parameter(a: LayeredAnsatz, index: int, delta: float) -> LayeredAnsatz:
    """Copy of the ansatz with theta[index] shifted by delta."""
    if not 0 <= index < a.theta.size:
        raise ValueError(f"parameter index {index} out of range")
    theta = a.theta.copy()
    theta[index] += delta
    return replace(a, theta=theta)


def build_unitary(a: LayeredAnsatz) -> np.ndarray:
    """Materialize V(theta) as a dense 2^n x 2^n matrix."""
    d = 2**a.n
    v = np.eye(d, dtype=complex)
    for mat, pair in zip(a.block_matrices(), a.block_pairs):
        v = _apply_left(v, mat, pair, a.n)
    return v


def apply_ansatz(rho: DensityMatrix, a: LayeredAnsatz) -> DensityMatrix:
    """V(theta) rho V(theta)^dag, applied block by block."""
    if rho.n != a.n:
        raise ValueError(f"state has n={rho.n}, ansatz has n={a.n}")
    data = rho.data
    for mat, pair in zip(a.block_matrices(), a.block_pairs):
        data = _conjugate(data, mat, pair, a.n)
    return DensityMatrix(data, validate=False)


def prepare_eigenvector(a: LayeredAnsatz, z: str) -> PureState:
    """V^dag(theta) |z>: the circuit that prepares an inferred eigenvector."""
    if len(z) != a.n:
        raise ValueError(f"bitstring length {len(z)} does not match n={a.n}")
    vec = np.zeros(2**a.n, dtype=complex)
    vec[bitstring_to_index(z)] = 1.0
    mats = a.block_matrices()
    pairs = a.block_pairs
    for mat, pair in zip(reversed(mats), reversed(pairs)):
        vec = apply_to_vector(vec, mat.conj().T, pair, a.n)
    return PureState(vec, validate=False)
