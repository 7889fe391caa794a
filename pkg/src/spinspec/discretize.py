"""Discrete self-adjoint models of the circle Dirac operator.

Two schemes:

* ``Scheme.SPECTRAL`` conjugates an exact diagonal mode matrix back to the
  grid, so its eigenvalues are the closed-form twisted values to machine
  precision.
* ``Scheme.CENTRAL_DIFFERENCE`` is the tridiagonal-with-wrap stencil
  i (psi_{j+1} - psi_{j-1}) / (2h); its small eigenvalues converge to the
  closed forms at second order in h.

The bounding spin structure is the antiperiodic wrap (half-integer modes),
the non-bounding one is periodic (integer modes).  The Fourier-Laplace
conjugation by z^{f} turns the one-period block into the twisted family:
with the recorded branch of ln z, z = exp(-i c) reproduces the twist-c
operator.  Weight lifts are stored in angle units, so the lift of a
degree-d circle map rises by 2*pi*d across one period.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .conventions import CLIFFORD_SIGN, DEFAULT_LN_BRANCH, GROUPING_TOL
from .errors import ContractViolation
from .floquet import LaurentSymbol
from .linalg import hermitian_eigenvalues
from .spectra import SpectrumSample, SpinStructure

__all__ = [
    "Scheme",
    "DiscreteDirac",
    "WeightFunction",
    "FourierLaplaceOperator",
    "grid_angles",
    "build_circle_dirac",
    "gauge_conjugate",
    "fourier_laplace_family",
    "cover_operator_sections",
    "period_symbol",
    "mass_doubled",
    "spectrum_sample",
]

_HERMITICITY_TOL = 1e-12


class Scheme(enum.Enum):
    SPECTRAL = "spectral"
    CENTRAL_DIFFERENCE = "central"


def grid_angles(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class DiscreteDirac:
    """One-period discrete circle Dirac operator (n x n Hermitian)."""

    n: int
    scheme: Scheme
    spin: SpinStructure
    c: float
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (m.shape[0], m.shape[0]):
            raise ContractViolation("operator matrix must be square")
        scale = max(float(np.linalg.norm(m, "fro")), 1.0)
        if np.linalg.norm(m - m.conj().T, "fro") > _HERMITICITY_TOL * scale:
            raise ContractViolation("operator matrix must be Hermitian")


@dataclass(frozen=True)
class WeightFunction:
    """Discrete lift of a circle-valued map at the grid sites.

    ``values[j]`` is the lift at angle theta_j in angle units; continuing
    past the wrap adds 2*pi*degree, where ``degree`` is the winding of the
    underlying map.  Degree-0 weights are honest periodic functions.
    """

    values: np.ndarray
    degree: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
            raise ContractViolation("weight values must be a finite 1-d array")
        object.__setattr__(self, "values", v)

    @classmethod
    def standard(cls, n: int, degree: int = 1) -> "WeightFunction":
        """Lift of the canonical degree-d map theta -> d*theta."""
        return cls(values=degree * grid_angles(n), degree=degree)

    @classmethod
    def periodic(cls, values) -> "WeightFunction":
        return cls(values=np.asarray(values, dtype=float), degree=0)

    def lifted(self, j: int) -> float:
        """Weight at site j of the cover (j may run past one period)."""
        n = self.values.size
        q, r = divmod(j, n)
        return float(self.values[r] + 2.0 * math.pi * self.degree * q)


@dataclass(frozen=True)
class FourierLaplaceOperator:
    """Conjugated one-period operator together with the branch data that
    produced it (the transform depends on the chosen branch of ln z)."""

    matrix: np.ndarray
    z: complex
    branch: int
    ln_z: complex


def _modes(n: int, spin: SpinStructure) -> np.ndarray:
    base = np.arange(-n // 2, n // 2, dtype=float)
    return base + 0.5 if spin is SpinStructure.BOUNDING else base


def _wrap_sign(spin: SpinStructure) -> float:
    return -1.0 if spin is SpinStructure.BOUNDING else 1.0


def build_circle_dirac(n: int, scheme: Scheme, spin: SpinStructure,
                       c: float = 0.0) -> DiscreteDirac:
    """Discretize the twisted circle operator on n grid sites.

    Both schemes shift by the scalar twist term, which acts as -c under
    the recorded Clifford sign.  Spectral eigenvalues are exactly
    {k + 1/2 - c} (bounding) resp. {k - c} (non-bounding) over the n
    Fourier modes; the central-difference ones agree to O(h^2) away from
    the band edge.
    """
    if n < 8 or n % 2 != 0:
        raise ContractViolation("grid size must be even and at least 8")
    theta = grid_angles(n)
    twist = CLIFFORD_SIGN * float(c)
    if scheme is Scheme.SPECTRAL:
        mu = _modes(n, spin)
        f = np.exp(-1j * np.outer(mu, theta)) / math.sqrt(n)
        m = f.conj().T @ (np.diag(-mu).astype(complex) @ f)
        m = 0.5 * (m + m.conj().T)
        m += twist * np.eye(n)
    elif scheme is Scheme.CENTRAL_DIFFERENCE:
        h = 2.0 * np.pi / n
        t = np.zeros((n, n), dtype=complex)
        for j in range(n - 1):
            t[j, j + 1] = 1.0
        t[n - 1, 0] = _wrap_sign(spin)
        m = 1j * (t - t.T) / (2.0 * h)
        m += twist * np.eye(n)
    else:
        raise ContractViolation(f"unknown scheme {scheme!r}")
    return DiscreteDirac(n=n, scheme=scheme, spin=spin, c=float(c), matrix=m)


def gauge_conjugate(d: DiscreteDirac, u: WeightFunction, c: float) -> np.ndarray:
    """Return exp(-i c u) D exp(i c u) as a matrix.

    Only degree-0 weights are admissible: for nonzero degree the
    conjugating function would be multivalued on the circle.  The result
    is a unitary diagonal conjugation, hence isospectral to D.
    """
    if u.degree != 0:
        raise ContractViolation("gauge conjugation needs a degree-0 weight")
    if u.values.size != d.n:
        raise ContractViolation("weight grid does not match operator grid")
    uv = u.values
    return d.matrix * np.exp(-1j * c * (uv[:, None] - uv[None, :]))


def _fft_derivative(p: np.ndarray) -> np.ndarray:
    n = p.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    return np.real(np.fft.ifft(1j * k * np.fft.fft(p)))


def fourier_laplace_family(d: DiscreteDirac, f: WeightFunction, z: complex,
                           branch: int = DEFAULT_LN_BRANCH) -> FourierLaplaceOperator:
    """Conjugate the untwisted one-period operator by z^{f}.

    The conjugation multiplies each hop by z^{(weight drop across the
    hop)}, with the weight continued by its lift across the wrap; the
    difference from D is a zero-order (band-supported) term.  With branch
    ``k``, ln z = log|z| + i (Arg z + 2 pi k); at z = exp(-i c) the result
    is the twist-c operator (exactly in the spectral scheme, to O(h^2)
    interior accuracy for central differences).
    """
    if z == 0:
        raise ContractViolation("z must be nonzero")
    if d.c != 0.0:
        raise ContractViolation("start from the untwisted operator (c = 0)")
    if f.values.size != d.n:
        raise ContractViolation("weight grid does not match operator grid")
    ln_z = cmath.log(z) + 2j * math.pi * branch
    n = d.n
    if d.scheme is Scheme.SPECTRAL:
        theta = grid_angles(n)
        slope = f.degree + _fft_derivative(f.values - f.degree * theta)
        matrix = d.matrix - 1j * ln_z * np.diag(slope)
    else:
        matrix = d.matrix.astype(complex).copy()
        for j in range(n):
            k = (j + 1) % n
            drop = f.values[j] - f.lifted(j + 1)
            factor = cmath.exp(ln_z * drop)
            matrix[j, k] = matrix[j, k] * factor
            matrix[k, j] = matrix[k, j] / factor
    return FourierLaplaceOperator(matrix=matrix, z=complex(z), branch=branch, ln_z=ln_z)


def _period_blocks(matrix: np.ndarray):
    """Split a one-period matrix into (A_-1, A_0, A_1) by nearest-image
    displacement.  Entries whose wrapped displacement crosses the seam go
    to the inter-period blocks; the bandwidth must stay below n/2 for the
    split to be unambiguous."""
    m = np.asarray(matrix, dtype=complex)
    n = m.shape[0]
    a_m1 = np.zeros_like(m)
    a_0 = np.zeros_like(m)
    a_p1 = np.zeros_like(m)
    half = n // 2
    for j in range(n):
        for k in range(n):
            v = m[j, k]
            if v == 0:
                continue
            disp = (k - j + half) % n - half
            if disp == k - j:
                a_0[j, k] = v
            elif disp == k - j + n:
                a_p1[j, k] = v
            else:
                a_m1[j, k] = v
    return a_m1, a_0, a_p1


def _source_matrix(source: Union[DiscreteDirac, np.ndarray]) -> np.ndarray:
    return source.matrix if isinstance(source, DiscreteDirac) else np.asarray(source, dtype=complex)


def period_symbol(source: Union[DiscreteDirac, np.ndarray]) -> LaurentSymbol:
    """Banded block Laurent symbol of the periodic lattice operator whose
    one-period block is ``source``.  Evaluating it at the Floquet point
    z(c) from ``conventions.twist_to_floquet`` recovers (the spectrum of)
    the twist-c quotient operator."""
    a_m1, a_0, a_p1 = _period_blocks(_source_matrix(source))
    coeffs = {0: a_0}
    if np.any(a_p1):
        coeffs[1] = a_p1
    if np.any(a_m1):
        coeffs[-1] = a_m1
    return LaurentSymbol(coeffs)


def cover_operator_sections(source: Union[DiscreteDirac, np.ndarray],
                            periods: int) -> np.ndarray:
    """Finite section of the lifted operator on the cyclic cover: a block
    tridiagonal matrix of ``periods`` copies of the period block, coupled
    by the wrap hops, with open (truncated) ends."""
    if periods < 1:
        raise ContractViolation("need at least one period")
    a_m1, a_0, a_p1 = _period_blocks(_source_matrix(source))
    n = a_0.shape[0]
    out = np.zeros((periods * n, periods * n), dtype=complex)
    for p in range(periods):
        out[p * n:(p + 1) * n, p * n:(p + 1) * n] = a_0
        if p + 1 < periods:
            out[p * n:(p + 1) * n, (p + 1) * n:(p + 2) * n] = a_p1
            out[(p + 1) * n:(p + 2) * n, p * n:(p + 1) * n] = a_m1
    return out


def mass_doubled(matrix: np.ndarray, m: float) -> np.ndarray:
    """Synthetic massive model: double the components per site and couple
    them by an off-diagonal mass.  Eigenvalues become +-sqrt(mu^2 + m^2),
    so the twisted family (and its symbol) stays invertible uniformly in
    the twist, unlike a scalar shift which some twist always cancels."""
    a = np.asarray(matrix, dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.kron(a, sz) + m * np.kron(np.eye(a.shape[0]), sx)


def spectrum_sample(matrix: np.ndarray, band: Optional[int] = None,
                    grouping_tol: float = GROUPING_TOL) -> SpectrumSample:
    """Eigenvalues of a Hermitian matrix packaged as a SpectrumSample."""
    eig = hermitian_eigenvalues(matrix).eigenvalues
    if band is None:
        band = int(math.ceil(float(np.max(np.abs(eig))))) or 1
    return SpectrumSample.from_eigenvalues(eig, band=band, grouping_tol=grouping_tol)
