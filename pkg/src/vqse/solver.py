"""Optimization engine: parameter-shift gradients, Adam/GD steppers, the
adaptive training loop, eigenvalue readout and the shot planner.

The training loop follows a fixed iteration budget n_max.  With the adaptive
cost, every s iterations (s divides n_max) the transformed state is measured
in the standard basis, the m most likely bitstrings become the marked states
of the global part, and the Hamiltonian is rebuilt as
(1 - t) H_L + t H_G(t) with t = k / n_max.  Between updates the Hamiltonian
is frozen, which makes the effective schedule f(t) stepwise-constant with
f(0) = 0 and f(1) = 1.  For the fixed local / global costs the loop reduces
to plain gradient descent on a constant Hamiltonian.

Gradients use the exact parameter-shift identity: under half-angle rotation
generators, dC/dtheta_nu = [C(theta_nu + pi/2) - C(theta_nu - pi/2)] / 2.
The exact-cost path evaluates the shifted costs as Tr[K_b B rho_b B^dag]
with the Hamiltonian pulled back through the circuit suffix (algebraically
identical to re-running the full shifted circuit, but one small-gate
conjugation per term instead of a full forward pass).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ansatz import LayeredAnsatz, apply_ansatz, block_unitary
from .hamiltonians import (
    AdaptiveHamiltonian,
    GlobalPart,
    Hamiltonian,
    LocalWeights,
    sample_counts,
)
from .qmath import DensityMatrix, _conjugate, exact_eigs, index_to_bitstring


@dataclass(frozen=True)
class StepwiseSchedule:
    """Iteration budget n_max with a Hamiltonian update every s iterations."""

    n_max: int
    s: int

    def __post_init__(self):
        if self.n_max < 1 or self.s < 1:
            raise ValueError("n_max and s must be positive")
        if self.n_max % self.s != 0:
            raise ValueError(f"s={self.s} must divide n_max={self.n_max}")

    def t(self, k: int) -> float:
        """Loop time of iteration k (1-based), t in (0, 1]."""
        return k / self.n_max

    def is_update(self, k: int) -> bool:
        return k % self.s == 0

    def __call__(self, t: float) -> float:
        """Stepwise f(t): the loop time of the most recent update."""
        return math.floor(t * self.n_max / self.s) * self.s / self.n_max


@dataclass(frozen=True)
class EigenEstimate:
    """Ordered eigenvalue estimates and the bitstrings they were read from.

    shots_used == 0 means the estimates are exact diagonal entries of the
    transformed state; otherwise they are empirical frequencies.  `padded`
    flags estimates filled with zeros because fewer than m distinct
    bitstrings were observed.
    """

    lambdas: np.ndarray
    bitstrings: tuple[str, ...]
    shots_used: int = 0
    padded: bool = False

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float).reshape(-1)
        lam.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "bitstrings", tuple(self.bitstrings))
        if lam.size != len(self.bitstrings):
            raise ValueError("one bitstring per estimate required")
        if len(set(self.bitstrings)) != len(self.bitstrings):
            raise ValueError("bitstrings must be distinct")
        if np.any(lam < -1e-12) or np.any(lam > 1 + 1e-12):
            raise ValueError("estimates must lie in [0, 1]")
        if np.any(np.diff(lam) > 1e-12):
            raise ValueError("estimates must be sorted descending")
        if lam.sum() > 1.0 + 1e-9:
            raise ValueError(f"estimates sum to {lam.sum()} > 1")

    @property
    def m(self) -> int:
        return self.lambdas.size


@dataclass(frozen=True)
class ShotPlan:
    """Measurement budget meeting a relative-error / failure-probability target.

    n_runs >= ln(1/delta) / (2 c^2 lambda_min^2) guarantees that every
    eigenvalue of interest (>= lambda_min) has relative error below c except
    with probability delta, by Hoeffding's inequality.
    """

    c: float
    delta: float
    lambda_min: float
    n_runs: int


def plan_shots(c: float, delta: float, lambda_min: float) -> ShotPlan:
    if c <= 0 or lambda_min <= 0:
        raise ValueError("c and lambda_min must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    n = math.ceil(math.log(1.0 / delta) / (2.0 * c**2 * lambda_min**2))
    return ShotPlan(c, delta, lambda_min, max(n, 1))


def readout(rho: DensityMatrix, a: LayeredAnsatz, m: int, shots: int = 0, rng=None) -> EigenEstimate:
    """Top-m standard-basis probabilities of V rho V^dag, largest first.

    shots == 0 reads the exact diagonal; shots > 0 uses sampled frequencies.
    Ties are broken by bitstring order.  If fewer than m distinct bitstrings
    were observed, missing entries are zero-padded and flagged.
    """
    if not 1 <= m <= 2**rho.n:
        raise ValueError(f"m={m} out of range")
    rho_t = apply_ansatz(rho, a)
    if shots == 0:
        p = rho_t.diagonal()
        shots_used = 0
    else:
        p = sample_counts(rho_t, shots, rng) / shots
        shots_used = shots
    order = np.argsort(-p, kind="stable")[:m]
    lambdas = np.clip(p[order], 0.0, 1.0)
    padded = bool(shots_used and np.any(lambdas == 0.0))
    return EigenEstimate(
        lambdas=lambdas,
        bitstrings=tuple(index_to_bitstring(int(i), rho.n) for i in order),
        shots_used=shots_used,
        padded=padded,
    )


def param_shift_gradient(
    rho: DensityMatrix, a: LayeredAnsatz, h: Hamiltonian, shots: int = 0, rng=None
) -> np.ndarray:
    """dC/dtheta_nu for every parameter via +-pi/2 parameter shifts.

    Each component is [C(theta_nu + pi/2) - C(theta_nu - pi/2)] / 2 with C
    evaluated exactly (shots == 0) or from `shots` fresh samples per shifted
    circuit.
    """
    energies = h.energies()
    if energies.size != rho.dim:
        raise ValueError("Hamiltonian and state disagree on qubit count")
    if shots == 0:
        return _gradient_exact(rho, a, energies)
    return _gradient_sampled(rho, a, energies, shots, np.random.default_rng(rng))


def _forward_states(rho: DensityMatrix, a: LayeredAnsatz, mats) -> list[np.ndarray]:
    """States entering each block: rho_b = (U_b ... U_1) rho (.)^dag, b=0..B-1."""
    states = [rho.data]
    for mat, pair in zip(mats[:-1], a.block_pairs[:-1]):
        states.append(_conjugate(states[-1], mat, pair, a.n))
    return states


def _gradient_exact(rho: DensityMatrix, a: LayeredAnsatz, energies: np.ndarray) -> np.ndarray:
    mats = a.block_matrices()
    pairs = a.block_pairs
    states = _forward_states(rho, a, mats)
    grad = np.empty(a.theta.size)
    w = a.kind.angles_per_block
    # Hamiltonian pulled back through the suffix: K_b = S_b^dag H S_b
    k_mat = np.diag(energies).astype(complex)
    for b in range(a.n_blocks - 1, -1, -1):
        pair = pairs[b]
        angles = a.block_angles(b)
        for j in range(w):
            nu = b * w + j
            val = {}
            for sign in (+1.0, -1.0):
                shifted = angles.copy()
                shifted[j] += sign * np.pi / 2
                bmat = block_unitary(a.kind, shifted)
                moved = _conjugate(states[b], bmat, pair, a.n)
                val[sign] = np.vdot(k_mat, moved).real
            grad[nu] = 0.5 * (val[+1.0] - val[-1.0])
        k_mat = _conjugate(k_mat, mats[b].conj().T, pair, a.n)
    return grad


def _gradient_sampled(
    rho: DensityMatrix, a: LayeredAnsatz, energies: np.ndarray, shots: int, rng
) -> np.ndarray:
    grad = np.empty(a.theta.size)
    for nu in range(a.theta.size):
        val = {}
        for sign in (+1.0, -1.0):
            shifted = LayeredAnsatz(a.n, a.layers, a.kind, _shifted_theta(a, nu, sign * np.pi / 2))
            counts = sample_counts(apply_ansatz(rho, shifted), shots, rng)
            val[sign] = float(energies @ counts) / shots
        grad[nu] = 0.5 * (val[+1.0] - val[-1.0])
    return grad


def _shifted_theta(a: LayeredAnsatz, nu: int, delta: float) -> np.ndarray:
    theta = a.theta.copy()
    theta[nu] += delta
    return theta


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient stepper settings; kind is 'adam' or 'gd'."""

    kind: str = "adam"
    lr: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("adam", "gd"):
            raise ValueError(f"unknown optimizer {self.kind!r}")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")


class _Stepper:
    def __init__(self, cfg: OptimizerConfig, size: int):
        self.cfg = cfg
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.k = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        if cfg.kind == "gd":
            return theta - cfg.lr * grad
        self.k += 1
        self.m = cfg.beta1 * self.m + (1 - cfg.beta1) * grad
        self.v = cfg.beta2 * self.v + (1 - cfg.beta2) * grad**2
        mh = self.m / (1 - cfg.beta1**self.k)
        vh = self.v / (1 - cfg.beta2**self.k)
        return theta - cfg.lr * mh / (np.sqrt(vh) + cfg.epsilon)


@dataclass(frozen=True)
class CostConfig:
    """Which cost drives the loop: 'local', 'global' or 'adaptive'."""

    variant: str
    local: LocalWeights
    global_part: GlobalPart
    m: int
    shots: int = 0

    def __post_init__(self):
        if self.variant not in ("local", "global", "adaptive"):
            raise ValueError(f"unknown cost variant {self.variant!r}")
        if self.global_part.m != self.m:
            raise ValueError("global part must mark exactly m bitstrings")


class TracePoint(NamedTuple):
    iteration: int
    t: float
    cost: float
    eps_abs: float
    eps_rel: float


@dataclass
class OptimizeResult:
    theta_opt: np.ndarray
    trace: list[TracePoint]
    final_hamiltonian: Hamiltonian
    ansatz: LayeredAnsatz
    estimate: EigenEstimate | None = None


def optimize(
    rho: DensityMatrix,
    a: LayeredAnsatz,
    cost: CostConfig,
    schedule: StepwiseSchedule,
    optimizer: OptimizerConfig,
    rng=None,
    callback=None,
) -> OptimizeResult:
    """Run the training loop and return the final parameters plus the trace.

    Trace rows hold the cost after each step under the Hamiltonian in force,
    plus the oracle eigenvalue errors eps_abs / eps_rel of the current top-m
    diagonal against the exact spectrum (available classically here).  Row 0
    records the starting point.  A NaN cost aborts the run.

    `callback(k, t, ansatz, cost_value)`, when given, fires after every
    recorded row; experiments use it to track per-iteration observables.
    """
    rng = np.random.default_rng(rng)
    lam_exact = exact_eigs(rho)[0][: cost.m]
    if cost.variant == "local":
        h: Hamiltonian = cost.local
    elif cost.variant == "global":
        h = cost.global_part
    else:
        h = cost.local  # f(0) = 0: the loop starts from the local Hamiltonian
    stepper = _Stepper(optimizer, a.theta.size)
    trace = []

    def record(k: int, t: float, current: LayeredAnsatz):
        p = apply_ansatz(rho, current).diagonal()
        c = float(h.energies() @ p)
        if np.isnan(c):
            raise FloatingPointError(f"cost became NaN at iteration {k}")
        lam_est = -np.sort(-p)[: cost.m]
        eps_abs = float(((lam_exact - lam_est) ** 2).sum())
        nz = lam_exact > 1e-12
        eps_rel = float((((lam_exact - lam_est)[nz] / lam_exact[nz]) ** 2).sum())
        trace.append(TracePoint(k, t, c, eps_abs, eps_rel))
        if callback is not None:
            callback(k, t, current, c)

    record(0, 0.0, a)
    for k in range(1, schedule.n_max + 1):
        t = schedule.t(k)
        if cost.variant == "adaptive" and schedule.is_update(k):
            measured = readout(rho, a, cost.m, cost.shots, rng)
            h = AdaptiveHamiltonian(
                local=cost.local,
                global_part=cost.global_part.with_bitstrings(measured.bitstrings),
                f_of_t=schedule,
                t=t,
            )
        grad = param_shift_gradient(rho, a, h, cost.shots, rng)
        a = LayeredAnsatz(a.n, a.layers, a.kind, stepper.step(a.theta, grad))
        record(k, t, a)

    est = readout(rho, a, cost.m, cost.shots, rng)
    return OptimizeResult(
        theta_opt=a.theta, trace=trace, final_hamiltonian=h, ansatz=a, estimate=est
    )
