"""Brute-force oracle: Gaussian states as truncated number-basis density matrices.

States are assembled by applying exact exponentials of truncated gate
generators to a thermal input, while the same circuit is tracked exactly at
the moment level; the two representations describe the same state up to
truncation.  This covers arbitrary Gaussian states within the parameter
limits below, since every Gaussian unitary decomposes into displacements,
squeezers, phase rotations and beam splitters.

Generators are anti-Hermitian, so their exact exponentials are unitary and
the trace deficit stems from the thermal input tail alone; the population of
the top Fock level is reported as a secondary truncation diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import GaussianState
from .errors import InvalidParameter, NumericalError, TruncationError
from . import states as st

# Hard per-primitive limits; beyond them the default cutoffs are unreliable.
MAX_ALPHA = 1.5
MAX_SQUEEZE = 0.8
MAX_NBAR = 1.5

#: Default cutoff per mode, keyed by mode count; the oracle is capped at 2 modes.
DEFAULT_CUTOFFS = {1: 40, 2: 25}

TRACE_DEFICIT_BUDGET = 1e-8

# Sampling ranges (nbar, r, |alpha|) for random circuits, chosen so that the
# default cutoffs keep moment and fidelity truncation errors well below 1e-6.
SAMPLING_RANGES = {1: (0.6, 0.4, 0.8), 2: (0.35, 0.25, 0.5)}


@dataclass(frozen=True)
class FockDensityMatrix:
    n_modes: int
    cutoffs: tuple
    rho: np.ndarray
    trace_deficit: float
    top_level_population: float = 0.0

    def validate(self, herm_tol: float = 1e-12, eig_tol: float = 1e-10,
                 deficit_budget: float = TRACE_DEFICIT_BUDGET) -> None:
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > herm_tol * max(1.0, np.max(np.abs(rho))):
            raise NumericalError("density matrix is not Hermitian")
        eigs = np.linalg.eigvalsh(rho)
        if eigs[0] < -eig_tol:
            raise NumericalError(f"density matrix has eigenvalue {eigs[0]:.3e} < 0")
        tr = float(np.trace(rho).real)
        if not (1.0 - deficit_budget <= tr <= 1.0 + 1e-12):
            raise TruncationError(f"trace {tr} is outside [1 - budget, 1]")


@dataclass(frozen=True)
class CircuitSpec:
    """Thermal input followed by an ordered list of Gaussian primitives.

    Ops are tuples: ("displace", mode, alpha), ("squeeze", mode, r, phi),
    ("phase", mode, phi), ("beamsplitter", (j, k), theta, phi).
    """

    n_modes: int
    thermal_nbar: tuple
    ops: tuple


class BuildResult(NamedTuple):
    fock: FockDensityMatrix
    gaussian: GaussianState


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def destroy(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


def _embed(op: np.ndarray, mode: int, cutoffs: Sequence[int]) -> np.ndarray:
    factors = [np.eye(c) for c in cutoffs]
    factors[mode] = op
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def mode_operators(cutoffs: Sequence[int]) -> list:
    """Embedded annihilation operators a_k on the full tensor-product space."""
    return [_embed(destroy(c), k, cutoffs) for k, c in enumerate(cutoffs)]


def quadrature_operators(cutoffs: Sequence[int]) -> list:
    """Quadratures (x_1..x_n, p_1..p_n) with x = (a + a')/sqrt(2)."""
    a_ops = mode_operators(cutoffs)
    xs = [(a + a.conj().T) / np.sqrt(2.0) for a in a_ops]
    ps = [-1j * (a - a.conj().T) / np.sqrt(2.0) for a in a_ops]
    return xs + ps


def _unitary_from_generator(K: np.ndarray) -> np.ndarray:
    """exp(K) for anti-Hermitian K via the Hermitian eigenproblem of -iK."""
    herm = -1j * K
    w, U = np.linalg.eigh(herm)
    return (U * np.exp(1j * w)) @ U.conj().T


def thermal_fock(nbar: float, cutoff: int) -> np.ndarray:
    """Truncated geometric thermal state, p_k = nbar^k / (1 + nbar)^{k+1}."""
    if nbar < 0:
        raise InvalidParameter("thermal occupation must be >= 0")
    k = np.arange(cutoff)
    if nbar == 0:
        p = np.zeros(cutoff)
        p[0] = 1.0
    else:
        p = nbar ** k / (1.0 + nbar) ** (k + 1)
    return np.diag(p).astype(complex)


# ---------------------------------------------------------------------------
# circuit construction
# ---------------------------------------------------------------------------

def _validate_circuit(circuit: CircuitSpec) -> None:
    if circuit.n_modes not in (1, 2):
        raise InvalidParameter("the oracle supports 1 or 2 modes only")
    if len(circuit.thermal_nbar) != circuit.n_modes:
        raise InvalidParameter("thermal_nbar length must match the mode count")
    for nb in circuit.thermal_nbar:
        if not 0 <= nb <= MAX_NBAR:
            raise InvalidParameter(f"thermal occupation {nb} outside [0, {MAX_NBAR}]")
    for op in circuit.ops:
        kind = op[0]
        if kind == "displace":
            _, mode, alpha = op
            if abs(alpha) > MAX_ALPHA:
                raise InvalidParameter(f"|alpha| = {abs(alpha)} exceeds {MAX_ALPHA}")
        elif kind == "squeeze":
            _, mode, r, _ = op
            if abs(r) > MAX_SQUEEZE:
                raise InvalidParameter(f"|r| = {abs(r)} exceeds {MAX_SQUEEZE}")
        elif kind == "phase":
            _, mode, _ = op
        elif kind == "beamsplitter":
            _, modes, _, _ = op
            if len(set(modes)) != 2 or any(not 0 <= m < circuit.n_modes for m in modes):
                raise InvalidParameter("beamsplitter needs two distinct in-range modes")
            continue
        else:
            raise InvalidParameter(f"unknown primitive {kind!r}")
        if not 0 <= op[1] < circuit.n_modes:
            raise InvalidParameter(f"mode index {op[1]} out of range")


def _op_unitary(op, a_ops) -> np.ndarray:
    kind = op[0]
    if kind == "displace":
        _, mode, alpha = op
        a = a_ops[mode]
        return _unitary_from_generator(alpha * a.conj().T - np.conj(alpha) * a)
    if kind == "squeeze":
        _, mode, r, phi = op
        a = a_ops[mode]
        xi = r * np.exp(1j * phi)
        return _unitary_from_generator(
            0.5 * (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T))
    if kind == "phase":
        _, mode, phi = op
        a = a_ops[mode]
        return _unitary_from_generator(-1j * phi * a.conj().T @ a)
    _, modes, theta, phi = op
    aj, ak = a_ops[modes[0]], a_ops[modes[1]]
    return _unitary_from_generator(
        theta * (np.exp(1j * phi) * aj.conj().T @ ak - np.exp(-1j * phi) * aj @ ak.conj().T))


def _op_moment_action(op, n: int):
    """Exact (S, d) action of a primitive on (u, V) in the xxpp layout."""
    kind = op[0]
    if kind == "displace":
        _, mode, alpha = op
        d = np.zeros(2 * n)
        d[mode] = np.sqrt(2.0) * np.real(alpha)
        d[n + mode] = np.sqrt(2.0) * np.imag(alpha)
        return np.eye(2 * n), d
    if kind == "squeeze":
        _, mode, r, phi = op
        return st.embed_symplectic(st.squeeze_block(r, phi), [mode], n), np.zeros(2 * n)
    if kind == "phase":
        _, mode, phi = op
        return st.embed_symplectic(st.rotation_block(phi), [mode], n), np.zeros(2 * n)
    _, modes, theta, phi = op
    return st.embed_symplectic(st.beamsplitter_block(theta, phi), list(modes), n), np.zeros(2 * n)


def build_circuit_state(circuit: CircuitSpec, cutoff: int | None = None,
                        deficit_budget: float = TRACE_DEFICIT_BUDGET) -> BuildResult:
    """Build the same state as a truncated density matrix and as exact moments.

    Raises :class:`TruncationError` when the final trace deficit exceeds the
    budget; raise the cutoff in that case.
    """
    _validate_circuit(circuit)
    n = circuit.n_modes
    if cutoff is None:
        cutoff = DEFAULT_CUTOFFS[n]
    if cutoff < 4:
        raise InvalidParameter("cutoff must be at least 4")
    cutoffs = (cutoff,) * n
    a_ops = mode_operators(cutoffs)

    rho = thermal_fock(circuit.thermal_nbar[0], cutoff)
    for nb in circuit.thermal_nbar[1:]:
        rho = np.kron(rho, thermal_fock(nb, cutoff))

    u = np.zeros(2 * n)
    V = np.diag(np.concatenate([np.asarray(circuit.thermal_nbar)] * 2) + 0.5)
    for op in circuit.ops:
        U = _op_unitary(op, a_ops)
        rho = U @ rho @ U.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        S, d = _op_moment_action(op, n)
        u = S @ u + d
        V = S @ V @ S.T

    deficit = float(1.0 - np.trace(rho).real)
    top = _top_level_population(rho, cutoffs)
    if deficit > deficit_budget:
        raise TruncationError(
            f"trace deficit {deficit:.3e} exceeds budget {deficit_budget:.1e}; "
            "raise the cutoff")
    fock = FockDensityMatrix(n_modes=n, cutoffs=cutoffs, rho=rho,
                             trace_deficit=max(deficit, 0.0),
                             top_level_population=top)
    return BuildResult(fock=fock, gaussian=GaussianState(n, u, V))


def _top_level_population(rho: np.ndarray, cutoffs) -> float:
    dims = tuple(cutoffs)
    diag = np.diag(rho).real.reshape(dims)
    mask = np.zeros(dims, dtype=bool)
    for axis, c in enumerate(dims):
        sl = [slice(None)] * len(dims)
        sl[axis] = c - 1
        mask[tuple(sl)] = True
    return float(diag[mask].sum())


# ---------------------------------------------------------------------------
# fidelity and moments
# ---------------------------------------------------------------------------

def uhlmann_fidelity_matrix(r1: FockDensityMatrix, r2: FockDensityMatrix) -> float:
    """F = Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) via Hermitian eigendecompositions."""
    if r1.rho.shape != r2.rho.shape:
        raise InvalidParameter("density matrices have different dimensions")
    f = fidelity_of_matrices(r1.rho, r2.rho)
    if f > 1.0 + 1e-8:
        raise NumericalError(f"fidelity {f} exceeds 1 beyond tolerance")
    return min(f, 1.0)


def fidelity_of_matrices(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Uhlmann fidelity of two raw Hermitian PSD matrices (trace-normalized)."""
    rho1 = np.asarray(rho1) / np.trace(rho1)
    rho2 = np.asarray(rho2) / np.trace(rho2)
    w1, U1 = np.linalg.eigh(0.5 * (rho1 + rho1.conj().T))
    if w1[0] < -1e-8:
        raise NumericalError(f"eigenvalue {w1[0]:.3e} below -1e-8")
    root1 = (U1 * np.sqrt(np.clip(w1, 0.0, None))) @ U1.conj().T
    inner = root1 @ rho2 @ root1
    wm = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    if wm[0] < -1e-8:
        raise NumericalError(f"eigenvalue {wm[0]:.3e} below -1e-8")
    return float(np.sum(np.sqrt(np.clip(wm, 0.0, None))).real)


def moments_from_fock(r: FockDensityMatrix) -> GaussianState:
    """Mean and covariance of a Fock-space state from quadrature expectations."""
    Q = quadrature_operators(r.cutoffs)
    rho = r.rho / np.trace(r.rho)
    u = np.array([float(np.sum(rho * q.T).real) for q in Q])
    n2 = len(Q)
    M = np.empty((n2, n2))
    rq = [rho @ q for q in Q]
    for i in range(n2):
        for j in range(n2):
            # Tr(rq_i Q_j) without forming the product
            M[i, j] = float(np.sum(rq[i] * Q[j].T).real)
    V = 0.5 * (M + M.T) - np.outer(u, u)
    return GaussianState(r.n_modes, u, V)


# ---------------------------------------------------------------------------
# random circuits for oracle cross-checks
# ---------------------------------------------------------------------------

def random_circuit(n_modes: int, rng: np.random.Generator,
                   ranges: tuple | None = None) -> CircuitSpec:
    """Random circuit within the sampling ranges: thermal input, per-mode
    squeeze and phase, beam splitter between neighbours, per-mode displacement."""
    if n_modes not in SAMPLING_RANGES:
        raise InvalidParameter("random circuits support 1 or 2 modes")
    max_nb, max_r, max_al = SAMPLING_RANGES[n_modes] if ranges is None else ranges
    nbar = tuple(rng.uniform(0.0, max_nb, n_modes))
    ops = []
    for m in range(n_modes):
        ops.append(("squeeze", m, rng.uniform(-max_r, max_r), rng.uniform(0, 2 * np.pi)))
        ops.append(("phase", m, rng.uniform(0, 2 * np.pi)))
    for m in range(n_modes - 1):
        ops.append(("beamsplitter", (m, m + 1), rng.uniform(0, 2 * np.pi),
                    rng.uniform(0, 2 * np.pi)))
    for m in range(n_modes):
        alpha = rng.uniform(-max_al, max_al) + 1j * rng.uniform(-max_al, max_al)
        ops.append(("displace", m, alpha))
    return CircuitSpec(n_modes=n_modes, thermal_nbar=nbar, ops=tuple(ops))
