"""Bures geometry, quantum Fisher information and discrimination bounds.

The distance convention follows D_B = 2(1 - F); note that this is the
*squared* Bures distance in the most common textbook normalization.  The
metric is

    ds^2 = du^T V^{-1} du / 4 + delta / 8,

where delta is evaluated in the eigenbasis of W = -2 V i Omega as
sum_ij dW_ij dW_ji / (w_i w_j - 1), skipping index pairs with w_i w_j = 1
(the pseudo-inverse rule; such terms do not contribute, and skipping them is
what makes the formula valid for pure and mixed states alike).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import (
    DEFAULT_PHYS_TOL,
    GaussianState,
    as_xxpp,
    make_symplectic_form,
    _sym_eig_sqrt,
)
from .errors import InvalidParameter, NumericalError
from .fidelity import fidelity
from . import states

#: Terms with |w_i w_j - 1| below this are skipped in the metric sum.
DEFAULT_METRIC_TOL = 1e-9

#: Step used for moment derivatives in the analytic QFI mode.
DEFAULT_MOMENT_STEP = 1e-4

#: Step used by the finite-difference QFI mode.
DEFAULT_FD_STEP = 1e-3


@dataclass(frozen=True)
class MetricEvaluation:
    ds2: float
    mean_part: float
    cov_part: float
    skipped_terms: int


@dataclass(frozen=True)
class QfiMatrix:
    """Quantum Fisher information matrix H = 4 g for a vector parametrization."""

    H: np.ndarray
    labels: tuple


@dataclass(frozen=True)
class ErrorBounds:
    """Fidelity bounds on the N-copy discrimination error probability."""

    lower: float
    upper: float
    copies: int
    fidelity_used: float


class DeltaResult(NamedTuple):
    delta: float
    skipped: int


# ---------------------------------------------------------------------------
# Bures distance and metric
# ---------------------------------------------------------------------------

def bures_distance(s1: GaussianState, s2: GaussianState,
                   phys_tol: float = DEFAULT_PHYS_TOL) -> float:
    """D_B = 2 [1 - F(s1, s2)]  (squared-distance convention)."""
    return 2.0 * (1.0 - fidelity(s1, s2, phys_tol=phys_tol).F)


def bures_metric_delta(V: np.ndarray, dV: np.ndarray,
                       tol: float = DEFAULT_METRIC_TOL) -> DeltaResult:
    """Covariance contribution delta of the Bures metric.

    dV is mapped to dW = -2 dV i Omega, rotated to the eigenbasis of W and
    summed as dW_ij dW_ji / (w_i w_j - 1) over index pairs with
    |w_i w_j - 1| > tol; the number of skipped entries is returned alongside.
    """
    V = np.asarray(V, dtype=float)
    dV = np.asarray(dV, dtype=float)
    if dV.shape != V.shape:
        raise InvalidParameter("dV shape does not match V")
    scale = max(1.0, float(np.max(np.abs(dV))))
    if np.max(np.abs(dV - dV.T)) > 1e-8 * scale:
        raise InvalidParameter("dV must be symmetric")
    n = V.shape[0] // 2
    omega = make_symplectic_form(n)
    root, inv_root = _sym_eig_sqrt(V)
    if inv_root is None:
        raise NumericalError("V must be positive definite")
    # W = V^{1/2} U diag(w) U^+ V^{-1/2} with i V^{1/2} Omega V^{1/2} = U diag(w/2) U^+
    herm = 1j * root @ omega @ root
    halves, U = np.linalg.eigh(herm)
    w = 2.0 * halves
    dW = -2.0j * dV @ omega
    dWt = U.conj().T @ inv_root @ dW @ root @ U
    denom = np.outer(w, w) - 1.0
    keep = np.abs(denom) > tol
    total = complex(np.sum((dWt * dWt.T)[keep] / denom[keep]))
    if abs(total.imag) > 1e-7 * max(1.0, abs(total.real)):
        raise NumericalError("metric sum has imaginary residue %.3e" % total.imag)
    return DeltaResult(delta=float(total.real), skipped=int(keep.size - keep.sum()))


def bures_metric_delta_superop(V: np.ndarray, dV: np.ndarray) -> float:
    """delta = 4 Tr[dV (4 L_V + L_Omega)^{-1} dV] via an explicit pseudo-inverse.

    Builds the superoperator as a 4n^2 x 4n^2 matrix; intended as an
    independent cross-check of :func:`bures_metric_delta`, not for production.
    """
    V = np.asarray(V, dtype=float)
    dV = np.asarray(dV, dtype=float)
    n = V.shape[0] // 2
    omega = make_symplectic_form(n)
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    superop = 4.0 * np.kron(V, V) - np.kron(omega, omega)
    vec = dV.reshape(-1)
    return float(4.0 * vec @ (np.linalg.pinv(superop, rcond=1e-10) @ vec))


def bures_metric(s: GaussianState, du: np.ndarray, dV: np.ndarray,
                 tol: float = DEFAULT_METRIC_TOL) -> MetricEvaluation:
    """ds^2 = du^T V^{-1} du / 4 + delta / 8 for a state perturbed by (du, dV)."""
    s = as_xxpp(s)
    du = np.asarray(du, dtype=float)
    if du.shape != s.u.shape:
        raise InvalidParameter("du length does not match the state")
    mean_part = float(0.25 * du @ np.linalg.solve(s.V, du))
    delta, skipped = bures_metric_delta(s.V, dV, tol)
    cov_part = delta / 8.0
    return MetricEvaluation(ds2=mean_part + cov_part, mean_part=mean_part,
                            cov_part=cov_part, skipped_terms=skipped)


# ---------------------------------------------------------------------------
# quantum Fisher information
# ---------------------------------------------------------------------------

def _moment_derivatives(family: Callable[[float], GaussianState], theta0: float, h: float):
    """4th-order central differences of the family's mean and covariance."""
    stencil = {k: as_xxpp(family(theta0 + k * h)) for k in (-2, -1, 1, 2)}
    du = (stencil[-2].u - 8.0 * stencil[-1].u + 8.0 * stencil[1].u - stencil[2].u) / (12.0 * h)
    dV = (stencil[-2].V - 8.0 * stencil[-1].V + 8.0 * stencil[1].V - stencil[2].V) / (12.0 * h)
    return du, dV


def qfi_scalar(family: Callable[[float], GaussianState], theta0: float,
               mode: str = "analytic", h: float | None = None,
               metric_tol: float = DEFAULT_METRIC_TOL) -> float:
    """Quantum Fisher information H(theta) of a one-parameter Gaussian family.

    ``analytic`` differentiates the moment maps and evaluates H = 4 g from the
    metric; ``finite_difference`` evaluates 8 [1 - F(rho_theta, rho_theta+h)] / h^2.
    The two agree in the h -> 0 limit.
    """
    if mode == "analytic":
        step = DEFAULT_MOMENT_STEP if h is None else h
        du, dV = _moment_derivatives(family, theta0, step)
        base = as_xxpp(family(theta0))
        metric = bures_metric(base, du, dV, metric_tol)
        return 4.0 * metric.ds2
    if mode == "finite_difference":
        step = DEFAULT_FD_STEP if h is None else h
        f = fidelity(family(theta0), family(theta0 + step)).F
        return 8.0 * (1.0 - f) / step ** 2
    raise InvalidParameter(f"unknown QFI mode {mode!r}")


def qfi_matrix(family: Callable[[Sequence[float]], GaussianState],
               theta0: Sequence[float], h: float = DEFAULT_MOMENT_STEP,
               labels: Sequence[str] | None = None,
               metric_tol: float = DEFAULT_METRIC_TOL) -> QfiMatrix:
    """QFI matrix H_ij = 4 g_ij of a vector-parametrized Gaussian family.

    Diagonal entries come from the metric along each axis; off-diagonal
    entries use the polarization identity on axis-sum directions, which reuses
    the exact metric formula instead of mixed finite differences of F.
    """
    theta0 = np.asarray(theta0, dtype=float)
    m = len(theta0)
    base = as_xxpp(family(theta0))

    def direction_form(direction: np.ndarray) -> float:
        line = lambda t: family(theta0 + t * direction)
        du, dV = _moment_derivatives(line, 0.0, h)
        return bures_metric(base, du, dV, metric_tol).ds2

    q_axis = np.array([direction_form(np.eye(m)[i]) for i in range(m)])
    H = np.zeros((m, m))
    for i in range(m):
        H[i, i] = 4.0 * q_axis[i]
        for j in range(i + 1, m):
            q_sum = direction_form(np.eye(m)[i] + np.eye(m)[j])
            H[i, j] = H[j, i] = 2.0 * (q_sum - q_axis[i] - q_axis[j])
    label_tuple = tuple(labels) if labels is not None else tuple(
        f"theta_{i}" for i in range(m))
    return QfiMatrix(H=H, labels=label_tuple)


# ---------------------------------------------------------------------------
# discrimination bounds
# ---------------------------------------------------------------------------

def error_bounds(F: float, N: int) -> ErrorBounds:
    """Fidelity bounds on the minimum error probability for N copies.

        (1 - sqrt(1 - F^{2N})) / 2  <=  p_err(N)  <=  F^N / 2

    Multiplicativity under tensor products enters as F^N.
    """
    if not (-1e-12 <= F <= 1.0 + 1e-12):
        raise InvalidParameter(f"fidelity must lie in [0, 1], got {F}")
    if N < 1 or int(N) != N:
        raise InvalidParameter("copy count must be a positive integer")
    f = min(max(float(F), 0.0), 1.0)
    fn = f ** N
    lower = 0.5 * (1.0 - np.sqrt(max(1.0 - fn * fn, 0.0)))
    return ErrorBounds(lower=float(lower), upper=float(0.5 * fn),
                       copies=int(N), fidelity_used=f)


# ---------------------------------------------------------------------------
# named one-parameter families for the CLI
# ---------------------------------------------------------------------------

def coherent_displacement_family(theta: float) -> GaussianState:
    """Vacuum displaced along x: u = (theta, 0), V = I/2.  H = 2."""
    return states.displace(states.vacuum(1), [theta, 0.0])


def thermal_nbar_family(theta: float) -> GaussianState:
    """Single-mode thermal state with occupation theta.  H = 1/(theta(theta+1))."""
    return states.thermal([theta])


def squeeze_r_family(theta: float) -> GaussianState:
    """Squeezed vacuum with squeezing parameter theta.  H = 2 for all theta."""
    return states.squeezed([theta])


def phase_theta_family(theta: float) -> GaussianState:
    """Squeezed vacuum (r = 1) rotated by theta; phase estimation benchmark."""
    rot = states.embed_symplectic(states.rotation_block(theta), [0], 1)
    return states.apply_symplectic(states.squeezed([1.0]), rot)


FAMILIES = {
    "coherent-displacement": coherent_displacement_family,
    "thermal-nbar": thermal_nbar_family,
    "squeeze-r": squeeze_r_family,
    "phase-theta": phase_theta_family,
}


def get_family(name: str) -> Callable[[float], GaussianState]:
    try:
        return FAMILIES[name]
    except KeyError:
        raise InvalidParameter(
            f"unknown family {name!r}; available: {sorted(FAMILIES)}") from None
