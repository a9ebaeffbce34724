"""Error functionals for a completed run and the two verification bounds.

For exact eigenvalues lambda_i and estimates lambda~_i (top-m diagonal
entries of the transformed state):

* eps_lambda = sum_{i<=m} (lambda_i - lambda~_i)^2      (absolute error)
* eps_rel    = sum_{i<=m} (lambda_i - lambda~_i)^2 / lambda_i^2
* eps_v      = sum_{i<=m} <delta_i|delta_i>, with
  |delta_i> = rho |v_i> - lambda~_i |v_i> for the prepared eigenvector |v_i>.

Two computable upper bounds hold for both eps_lambda and eps_v:

* cost bound:    Tr[rho^2] - (E_{m+1} - C)^2 / sum_{i<=m} (E_{m+1} - E_i)^2,
  from the final cost C and the m+1 smallest energies of the cost
  Hamiltonian (degenerates to Tr[rho^2] when E_{m+1} <= C);
* purity bound:  Tr[rho^2] - (sum_{i<=m^} lambda~_i^2
                  + (1 - sum lambda~_i)^2 / (2^n - m^)),
  from the readout alone, for any m <= m^ < 2^n.  The purity bound is always
  at least as tight as the cost bound and improves as m^ grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .ansatz import LayeredAnsatz, prepare_eigenvector
from .qmath import DensityMatrix
from .solver import EigenEstimate

ZERO_EIGENVALUE_TOL = 1e-12
BOUND_SLACK = 1e-9


class EigenErrors(NamedTuple):
    eps_lambda: float
    eps_rel: float
    n_excluded: int  # relative-error terms dropped because lambda_i ~ 0


def eigen_errors(exact: np.ndarray, est: EigenEstimate, m: int) -> EigenErrors:
    """Absolute and relative eigenvalue errors over the top m estimates.

    Relative-error terms with an exact eigenvalue at numerical zero are
    excluded from the sum and counted in n_excluded.
    """
    exact = np.asarray(exact, dtype=float)
    if est.m < m or exact.size < m:
        raise ValueError(f"need at least m={m} exact values and estimates")
    d = exact[:m] - est.lambdas[:m]
    nz = exact[:m] > ZERO_EIGENVALUE_TOL
    eps_rel = float(((d[nz] / exact[:m][nz]) ** 2).sum())
    return EigenErrors(float((d**2).sum()), eps_rel, int(m - nz.sum()))


def eigenvector_error(rho: DensityMatrix, a: LayeredAnsatz, est: EigenEstimate) -> float:
    """Residual sum_i || rho |v_i> - lambda~_i |v_i> ||^2 for prepared eigenvectors."""
    total = 0.0
    for lam, z in zip(est.lambdas, est.bitstrings):
        v = prepare_eigenvector(a, z).amplitudes
        delta = rho.data @ v - lam * v
        total += float(np.vdot(delta, delta).real)
    return total


class CostBound(NamedTuple):
    value: float
    degenerate: bool  # True when E_{m+1} <= C and the bound collapses to the purity


def bound_from_cost(cost: float, energies: Sequence[float], purity: float) -> CostBound:
    """Eigenvalue/eigenvector error bound from the final cost value.

    `energies` are the m+1 smallest eigenenergies of the cost Hamiltonian in
    ascending order.  When the cost exceeds E_{m+1} the bound degenerates to
    the purity itself and is flagged.
    """
    e = np.asarray(energies, dtype=float)
    if e.size < 2:
        raise ValueError("need at least the two smallest energies")
    if np.any(np.diff(e) < 0):
        raise ValueError("energies must be ascending")
    top = e[-1]
    denom = float(((top - e[:-1]) ** 2).sum())
    if denom <= 0:
        raise ValueError("degenerate energy list: all levels equal E_{m+1}")
    if top <= cost:
        return CostBound(float(purity), True)
    return CostBound(float(purity - (top - cost) ** 2 / denom), False)


def bound_from_purity(purity: float, est_lambdas: Sequence[float], n: int, m_hat: int) -> float:
    """Eigenvalue/eigenvector error bound from the readout alone (m^ entries)."""
    lam = np.asarray(est_lambdas, dtype=float)
    if m_hat != lam.size:
        raise ValueError("m_hat must equal the number of estimates supplied")
    if not 1 <= m_hat < 2**n:
        raise ValueError(f"m_hat={m_hat} must lie in [1, 2^n)")
    if np.any(np.diff(lam) > 1e-12):
        raise ValueError("estimates must be sorted descending")
    tail = (1.0 - lam.sum()) ** 2 / (2**n - m_hat)
    return float(purity - ((lam**2).sum() + tail))


def default_m_hat(m: int, n: int) -> int:
    """Default readout width for the purity bound: min(2m, 2^n - 1)."""
    return min(2 * m, 2**n - 1)


def runs_per_success(errors: Sequence[float], target: float) -> float:
    """Total runs divided by runs with eps_lambda below target; inf if none."""
    errors = list(errors)
    if not errors:
        raise ValueError("need at least one run")
    if target <= 0:
        raise ValueError("target must be positive")
    good = sum(1 for e in errors if e < target)
    return math.inf if good == 0 else len(errors) / good


@dataclass(frozen=True)
class ErrorReport:
    """All error functionals and bounds for one completed run."""

    eps_lambda: float
    eps_rel: float
    eps_v: float
    bound_cost: float
    bound_purity: float
    m_hat: int
    bound_cost_degenerate: bool = False
    rel_terms_excluded: int = 0


def build_error_report(
    rho: DensityMatrix,
    a: LayeredAnsatz,
    est: EigenEstimate,
    exact: np.ndarray,
    cost: float,
    lowest_energies: Sequence[float],
    purity: float,
    est_wide: EigenEstimate | None = None,
) -> ErrorReport:
    """Assemble the report; `est_wide` supplies the m^ > m readout if available."""
    m = est.m
    wide = est_wide if est_wide is not None else est
    errs = eigen_errors(exact, est, m)
    cb = bound_from_cost(cost, lowest_energies, purity)
    return ErrorReport(
        eps_lambda=errs.eps_lambda,
        eps_rel=errs.eps_rel,
        eps_v=eigenvector_error(rho, a, est),
        bound_cost=cb.value,
        bound_purity=bound_from_purity(purity, wide.lambdas, rho.n, wide.m),
        m_hat=wide.m,
        bound_cost_degenerate=cb.degenerate,
        rel_terms_excluded=errs.n_excluded,
    )


def check_error_report(report: ErrorReport) -> list[str]:
    """Names of violated bound inequalities (empty when the run verifies)."""
    violations = []
    for name, err in (("eps_lambda", report.eps_lambda), ("eps_v", report.eps_v)):
        if err > report.bound_cost + BOUND_SLACK:
            violations.append(f"{name} > bound_cost ({err:.3e} > {report.bound_cost:.3e})")
        if err > report.bound_purity + BOUND_SLACK:
            violations.append(f"{name} > bound_purity ({err:.3e} > {report.bound_purity:.3e})")
    if report.bound_purity > report.bound_cost + BOUND_SLACK:
        violations.append(
            f"bound_purity > bound_cost ({report.bound_purity:.3e} > {report.bound_cost:.3e})"
        )
    return violations
