"""Uhlmann fidelity between multimode Gaussian states from first and second moments.

The central quantity is the auxiliary matrix

    V_aux = Omega^T (V1 + V2)^{-1} (Omega/4 + V2 Omega V1),

whose spectrum (in the form of the eigenvalue pairs +-w of W_aux = -2 V_aux i Omega,
all with |w| >= 1) determines the covariance part of the fidelity:

    F = Ftot * det(V1 + V2)^{-1/4} * exp[-(u2-u1)^T (V1+V2)^{-1} (u2-u1) / 4],
    Ftot = prod_k [w_k + sqrt(w_k^2 - 1)]^{1/2}.

Unit pairs (w = 1) arise from pure modes and do not contribute; they are
discarded and counted.  The same spectrum yields the symplectic invariants
I_2k = Tr(W_aux^{2k}) and the classic closed forms for one, two and three modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_PHYS_TOL,
    GaussianState,
    ModeOrdering,
    as_xxpp,
    make_symplectic_form,
    require_physical,
    symplectic_eigenvalues,
    williamson,
    xxpp_to_xpxp_indices,
)
from .errors import InvalidParameter, NumericalError

#: Pairs with |w - 1| below this are treated as pure-mode pairs and discarded.
DEFAULT_PURE_TOL = 1e-9

#: Retained eigenvalues this far below 1 indicate a numerical breakdown.
_W_BELOW_ONE_LIMIT = 1e-6


@dataclass(frozen=True)
class AuxMatrix:
    """The real auxiliary matrix V_aux; W_aux = -2 V_aux i Omega is implied."""

    V_aux: np.ndarray

    @property
    def W_aux(self) -> np.ndarray:
        n = self.V_aux.shape[0] // 2
        return -2.0j * self.V_aux @ make_symplectic_form(n)


@dataclass(frozen=True)
class AuxSpectrum:
    """Positive spectrum {w >= 1} of W_aux after unit pairs are removed."""

    retained: np.ndarray
    discarded_pairs: int


@dataclass(frozen=True)
class InvariantSet:
    """Symplectic invariants of a state pair.

    ``i2k[k-1] = Tr(W_aux^{2k})`` for k = 1..n, ``delta = det(V1+V2)``,
    ``gamma = 4^n det(Omega V1 Omega V2 - I/4)`` and
    ``lam = 4^n det(V1 + i Omega/2) det(V2 + i Omega/2)``.  ``char_coeffs``
    holds the characteristic polynomial of W_aux, highest power first.
    """

    i2k: np.ndarray
    gamma: float
    lam: float
    delta: float
    char_coeffs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.i2k)

    def chi(self, lam_value: float) -> float:
        return float(np.polyval(self.char_coeffs, lam_value))


@dataclass(frozen=True)
class FidelityReport:
    """Fidelity value with the intermediate quantities it was built from."""

    F: float
    F0: float
    Ftot: float
    det_v_sum: float
    disp_exponent: float
    waux_spectrum: np.ndarray
    discarded_pairs: int
    invariants: InvariantSet
    F_raw: float
    clamped: bool


# ---------------------------------------------------------------------------
# auxiliary matrix and its spectrum
# ---------------------------------------------------------------------------

def aux_matrix(V1: np.ndarray, V2: np.ndarray) -> AuxMatrix:
    """V_aux of a covariance pair (xxpp layout)."""
    V1 = np.asarray(V1, dtype=float)
    V2 = np.asarray(V2, dtype=float)
    if V1.shape != V2.shape:
        raise InvalidParameter("covariance matrices have mismatched shapes")
    n = V1.shape[0] // 2
    omega = make_symplectic_form(n)
    rhs = omega / 4.0 + V2 @ omega @ V1
    return AuxMatrix(V_aux=omega.T @ np.linalg.solve(V1 + V2, rhs))


def _paired_imag_eigenvalues(A: np.ndarray) -> np.ndarray:
    """|Im| of the +-i w eigenvalue pairs of a real matrix, descending."""
    eigs = np.linalg.eigvals(A)
    scale = np.linalg.norm(A)
    if np.max(np.abs(eigs.real)) > 1e-6 * max(scale, 1.0):
        raise NumericalError(
            "spectrum is not purely imaginary (max |Re| = %.3e)" % np.max(np.abs(eigs.real)))
    return np.sort(np.abs(eigs.imag))[::-1][::2].copy()


def aux_spectrum(aux: AuxMatrix, tol: float = DEFAULT_PURE_TOL) -> AuxSpectrum:
    """Eigenvalue pairs of W_aux from the real matrix A = 2 V_aux Omega.

    A has spectrum +-i w; pairs with |w - 1| <= tol come from pure modes,
    contribute a factor 1, and are dropped.  Retained values are clamped to
    w >= 1 so that downstream square roots stay real.
    """
    n = aux.V_aux.shape[0] // 2
    omega = make_symplectic_form(n)
    w = _paired_imag_eigenvalues(2.0 * aux.V_aux @ omega)
    unit = np.abs(w - 1.0) <= tol
    retained = w[~unit]
    if retained.size and retained.min() < 1.0 - _W_BELOW_ONE_LIMIT:
        raise NumericalError(
            "retained W_aux eigenvalue %.12g lies below 1; inputs are likely unphysical"
            % float(retained.min()))
    return AuxSpectrum(retained=np.clip(retained, 1.0, None),
                       discarded_pairs=int(unit.sum()))


def ftot_from_spectrum(retained: np.ndarray) -> float:
    """Ftot = prod [w + sqrt(w^2-1)]^{1/2} = exp(sum arccosh(w) / 2)."""
    return float(np.exp(0.5 * np.sum(np.arccosh(np.clip(retained, 1.0, None)))))


# ---------------------------------------------------------------------------
# symplectic invariants
# ---------------------------------------------------------------------------

def _char_coeffs_from_traces(i2k: np.ndarray) -> np.ndarray:
    """Characteristic polynomial of W_aux from the trace invariants.

    Newton's identities convert the power sums of the squared pair eigenvalues
    (I_2m / 2) into the elementary symmetric functions; the polynomial in
    lambda is even, so odd coefficients vanish.
    """
    n = len(i2k)
    psums = np.asarray(i2k, dtype=float) / 2.0
    e = np.zeros(n + 1)
    e[0] = 1.0
    for m in range(1, n + 1):
        acc = 0.0
        for i in range(1, m + 1):
            acc += (-1.0) ** (i - 1) * e[m - i] * psums[i - 1]
        e[m] = acc / m
    coeffs = np.zeros(2 * n + 1)
    for k in range(n + 1):
        coeffs[2 * k] = (-1.0) ** k * e[k]
    return coeffs


def invariant_set(V1: np.ndarray, V2: np.ndarray, resid_tol: float = 1e-8) -> InvariantSet:
    """Trace and determinant invariants of a covariance pair."""
    V1 = np.asarray(V1, dtype=float)
    V2 = np.asarray(V2, dtype=float)
    n = V1.shape[0] // 2
    omega = make_symplectic_form(n)

    aux = aux_matrix(V1, V2)
    A2 = np.linalg.matrix_power(2.0 * aux.V_aux @ omega, 2)
    i2k = np.empty(n)
    power = np.eye(2 * n)
    for k in range(1, n + 1):
        power = power @ A2
        i2k[k - 1] = (-1.0) ** k * np.trace(power)

    sign, logdet = np.linalg.slogdet(V1 + V2)
    if sign <= 0:
        raise NumericalError("det(V1 + V2) is not positive")
    delta = float(sign * np.exp(logdet))
    gamma = float(4.0 ** n * np.linalg.det(omega @ V1 @ omega @ V2 - 0.25 * np.eye(2 * n)))

    d1 = np.linalg.det(V1 + 0.5j * omega)
    d2 = np.linalg.det(V2 + 0.5j * omega)
    lam_c = 4.0 ** n * d1 * d2
    # Lambda vanishes on pure states, so the relative check is floored by the
    # roundoff scale of the determinants (gamma >= delta > 0 anchors it).
    scale = max(abs(lam_c), 1e-6 * abs(gamma), 1e-300)
    if abs(lam_c.imag) > resid_tol * scale:
        raise NumericalError("Lambda has a non-vanishing imaginary part: %.3e" % lam_c.imag)

    return InvariantSet(i2k=i2k, gamma=gamma, lam=float(lam_c.real), delta=delta,
                        char_coeffs=_char_coeffs_from_traces(i2k))


# ---------------------------------------------------------------------------
# closed forms for one, two and three modes
# ---------------------------------------------------------------------------

def closed_form_fidelity(n: int, inv: InvariantSet) -> float:
    """Covariance part F0 of the fidelity from invariants alone, n <= 3."""
    if n != inv.n:
        raise InvalidParameter(f"invariant set is for {inv.n} modes, not {n}")
    if n == 1:
        lam = max(inv.lam, 0.0)
        return float((math.sqrt(inv.delta + lam) - math.sqrt(lam)) ** -0.5)
    if n == 2:
        root = math.sqrt(max(inv.gamma, 0.0)) + math.sqrt(max(inv.lam, 0.0))
        inner = math.sqrt(max(root * root - inv.delta, 0.0))
        return float((root - inner) ** -0.5)
    if n == 3:
        return _closed_form_three_modes(inv)
    raise InvalidParameter("closed forms are available for 1, 2 or 3 modes only")


def _closed_form_three_modes(inv: InvariantSet) -> float:
    i2, i4, i6 = inv.i2k
    p = i2 * i2 / 24.0 - i4 / 4.0
    q = -i2 ** 3 / 108.0 + i2 * i4 / 12.0 - i6 / 6.0
    scale = max(1.0, i2 * i2 / 24.0 + abs(i4) / 4.0)
    if p > 1e-10 * scale:
        raise NumericalError("characteristic cubic has p > 0 (p = %.3e)" % p)
    if abs(p) <= 1e-10 * scale:
        w = np.full(3, math.sqrt(i2 / 6.0))
    else:
        theta = math.acos(np.clip(3.0 * math.sqrt(3.0) * q / (2.0 * p * math.sqrt(-p)), -1.0, 1.0))
        k = np.arange(1, 4)
        w2 = i2 / 6.0 + 2.0 * math.sqrt(-p / 3.0) * np.cos((theta - 2.0 * np.pi * (k - 1)) / 3.0)
        w = np.sqrt(np.clip(w2, 1.0, None))
    return ftot_from_spectrum(w) / inv.delta ** 0.25


# ---------------------------------------------------------------------------
# the fidelity itself
# ---------------------------------------------------------------------------

def fidelity(s1: GaussianState, s2: GaussianState, phys_tol: float = DEFAULT_PHYS_TOL,
             pure_tol: float = DEFAULT_PURE_TOL) -> FidelityReport:
    """Uhlmann fidelity between two Gaussian states.

    Symmetric in its arguments, equal to 1 exactly when the states coincide,
    and valid for any mix of pure and mixed multimode states.  Values that
    exceed 1 by at most 1e-10 (roundoff) are clamped to 1 in ``F`` with the
    raw value kept in ``F_raw``.
    """
    s1 = as_xxpp(s1)
    s2 = as_xxpp(s2)
    if s1.n != s2.n:
        raise InvalidParameter(f"mode counts differ: {s1.n} vs {s2.n}")
    require_physical(s1, phys_tol)
    require_physical(s2, phys_tol)

    spectrum = aux_spectrum(aux_matrix(s1.V, s2.V), pure_tol)
    ftot = ftot_from_spectrum(spectrum.retained)

    v_sum = s1.V + s2.V
    sign, logdet = np.linalg.slogdet(v_sum)
    if sign <= 0:
        raise NumericalError("det(V1 + V2) is not positive")
    det_v_sum = float(sign * np.exp(logdet))
    du = s2.u - s1.u
    disp_exponent = float(-0.25 * du @ np.linalg.solve(v_sum, du))

    f0 = float(ftot * np.exp(-0.25 * logdet))
    f_raw = float(f0 * np.exp(disp_exponent))
    if f_raw > 1.0 + 1e-10:
        raise NumericalError("fidelity %.12g exceeds 1 beyond tolerance" % f_raw)
    clamped = f_raw > 1.0
    f = min(f_raw, 1.0)

    return FidelityReport(
        F=f,
        F0=f0,
        Ftot=ftot,
        det_v_sum=det_v_sum,
        disp_exponent=disp_exponent,
        waux_spectrum=spectrum.retained,
        discarded_pairs=spectrum.discarded_pairs,
        invariants=invariant_set(s1.V, s2.V),
        F_raw=f_raw,
        clamped=clamped,
    )


# ---------------------------------------------------------------------------
# independent cross-check routes
# ---------------------------------------------------------------------------

def alt_ftot_v12(V1: np.ndarray, V2: np.ndarray, resid_tol: float = 1e-7) -> float:
    """Ftot from the complex matrix V12 = -iOmega/2 + (V1+iOmega/2)(V1+V2)^{-1}(V2+iOmega/2).

    The spectrum of the associated W12 equals that of -W_aux, so this route
    must agree with the eigenvalue route; it is kept as a cross-check.
    Swapping the arguments evaluates the Hermitian-conjugate variant.
    """
    V1 = np.asarray(V1, dtype=float)
    V2 = np.asarray(V2, dtype=float)
    n = V1.shape[0] // 2
    omega = make_symplectic_form(n)
    half = 0.5j * omega
    v12 = -half + (V1 + half) @ np.linalg.solve(V1 + V2, V2 + half)
    m = v12 @ omega
    inner = np.eye(2 * n) + 0.25 * np.linalg.matrix_power(np.linalg.inv(m), 2)
    root = scipy.linalg.sqrtm(inner)
    ftot4 = complex(np.linalg.det(2.0 * (root + np.eye(2 * n)) @ v12))
    if abs(ftot4.imag) > resid_tol * max(abs(ftot4), 1e-30):
        raise NumericalError("Ftot^4 has imaginary residue %.3e" % ftot4.imag)
    if ftot4.real <= 0:
        raise NumericalError("Ftot^4 is not positive")
    return float(ftot4.real ** 0.25)


@dataclass(frozen=True)
class SingularReduction:
    """Diagnostic block reduction when pure symplectic eigenvalues are present.

    In the Williamson frame of the purer state (pure modes first, interleaved
    layout), V_aux is block upper-triangular with an I/2 corner of size 2r; the
    retained spectrum comes from the lower-right block alone.
    """

    r: int
    retained: np.ndarray
    corner_residual: float
    lower_block_residual: float
    reduced_block: np.ndarray


def singular_reduction(V1: np.ndarray, V2: np.ndarray,
                       tol: float = DEFAULT_PURE_TOL) -> SingularReduction:
    V1 = np.asarray(V1, dtype=float)
    V2 = np.asarray(V2, dtype=float)
    n = V1.shape[0] // 2
    nu1 = symplectic_eigenvalues(V1)
    nu2 = symplectic_eigenvalues(V2)
    r1 = int(np.sum(nu1 - 0.5 <= tol))
    r2 = int(np.sum(nu2 - 0.5 <= tol))
    if r2 > r1:
        V1, V2 = V2, V1
        r, nu = r2, nu2
    else:
        r, nu = r1, nu1

    omega = make_symplectic_form(n)
    dec = williamson(V1)
    s_inv = -omega @ dec.S.T @ omega
    v1d = s_inv @ V1 @ s_inv.T
    v2d = s_inv @ V2 @ s_inv.T
    # pure modes first (williamson returns nu descending, so pure modes last)
    pure = dec.nu - 0.5 <= tol
    mode_order = np.concatenate([np.flatnonzero(pure), np.flatnonzero(~pure)])
    idx = np.concatenate([mode_order, mode_order + n])
    v1d = v1d[np.ix_(idx, idx)]
    v2d = v2d[np.ix_(idx, idx)]

    vaux = aux_matrix(v1d, v2d).V_aux
    perm = xxpp_to_xpxp_indices(n)
    vaux = vaux[np.ix_(perm, perm)]

    corner = float(np.max(np.abs(vaux[:2 * r, :2 * r] - 0.5 * np.eye(2 * r)))) if r else 0.0
    lower = float(np.max(np.abs(vaux[2 * r:, :2 * r]))) if 0 < r < n else 0.0
    block = vaux[2 * r:, 2 * r:]
    if n > r:
        omega_t = make_symplectic_form(n - r, ModeOrdering.XPXP)
        w = _paired_imag_eigenvalues(2.0 * block @ omega_t)
        w = np.clip(w, 1.0, None)
    else:
        w = np.empty(0)
    return SingularReduction(r=r, retained=w, corner_residual=corner,
                             lower_block_residual=lower, reduced_block=block)
