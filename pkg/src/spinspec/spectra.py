"""Closed-form twisted Dirac spectra on model spin manifolds.

The circle carries two spin structures: the bounding one (it extends over
a disk), with spectrum {k + 1/2}, and the non-bounding one with spectrum
{k} and hence a kernel.  Twisting by c shifts both lattices by -c under
the recorded Clifford sign.  Round spheres of dimension l >= 2 have
eigenvalues +-(l/2 + k) with multiplicity 2^floor(l/2) * C(k+l-1, k), so
the square of the operator is bounded below by l^2/4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .conventions import CLIFFORD_SIGN, DEFAULT_TOL, EDGE_EXCLUSION, GROUPING_TOL
from .errors import ContractViolation

__all__ = [
    "SpinStructure",
    "SpectrumSample",
    "ModelManifold",
    "circle_spectrum",
    "sphere_spectrum",
    "product_square_spectrum",
    "spectra_match",
    "check_twist_periodicity",
    "check_exact_twist_invariance",
    "lichnerowicz_bound_check",
]


class SpinStructure(enum.Enum):
    BOUNDING = "bounding"
    NONBOUNDING = "nonbounding"


@dataclass(frozen=True)
class SpectrumSample:
    """Sorted (eigenvalue, multiplicity) pairs with a truncation radius.

    ``band`` records how far out the sample is trusted; comparisons drop
    the outermost eigenvalues, where band-truncated sets legitimately
    differ.  ``symmetric=True`` asserts (and validates) invariance under
    eigenvalue negation.
    """

    pairs: tuple
    band: int
    grouping_tol: float = GROUPING_TOL
    symmetric: bool = False

    def __post_init__(self):
        if not self.pairs:
            raise ContractViolation("empty spectrum")
        vals = [p[0] for p in self.pairs]
        if any(m < 1 for _, m in self.pairs):
            raise ContractViolation("multiplicities must be >= 1")
        if any(b - a <= self.grouping_tol for a, b in zip(vals, vals[1:])):
            raise ContractViolation("eigenvalues must be strictly increasing after grouping")
        if self.symmetric:
            for lam, mult in self.pairs:
                if self.find_multiplicity(-lam) != mult:
                    raise ContractViolation("spectrum is not symmetric under negation")

    @classmethod
    def from_eigenvalues(cls, values: Iterable[float], band: int,
                         grouping_tol: float = GROUPING_TOL,
                         symmetric: bool = False) -> "SpectrumSample":
        vals = np.sort(np.asarray(list(values), dtype=float))
        if vals.size == 0:
            raise ContractViolation("empty spectrum")
        pairs = []
        anchor, count = vals[0], 1
        for v in vals[1:]:
            if v - anchor <= grouping_tol:
                count += 1
            else:
                pairs.append((float(anchor), count))
                anchor, count = v, 1
        pairs.append((float(anchor), count))
        return cls(pairs=tuple(pairs), band=band,
                   grouping_tol=grouping_tol, symmetric=symmetric)

    def values(self) -> np.ndarray:
        """Eigenvalues expanded with multiplicity, ascending."""
        return np.array([lam for lam, m in self.pairs for _ in range(m)])

    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.pairs])

    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.pairs], dtype=int)

    def min_abs(self) -> float:
        return float(min(abs(lam) for lam, _ in self.pairs))

    def find_multiplicity(self, x: float) -> int:
        for lam, m in self.pairs:
            if abs(lam - x) <= self.grouping_tol:
                return m
        return 0

    def contains(self, x: float, tol: Optional[float] = None) -> bool:
        tol = self.grouping_tol if tol is None else tol
        return any(abs(lam - x) <= tol for lam, _ in self.pairs)


@dataclass(frozen=True)
class ModelManifold:
    """Description of a model space whose spectrum has a closed form:
    a circle with one of its two spin structures, a round sphere of
    dimension ``sphere_dim``, or a product of a base (given by its
    spectrum) with a round sphere."""

    kind: str  # "circle" | "sphere" | "product"
    spin: Optional[SpinStructure] = None
    sphere_dim: int = 0
    base_spectrum: Optional[SpectrumSample] = None

    def spectrum(self, c: float = 0.0, band: int = 8, kmax: int = 8,
                 cutoff: float = 25.0) -> SpectrumSample:
        if self.kind == "circle":
            return circle_spectrum(self.spin, c, band)
        if self.kind == "sphere":
            return sphere_spectrum(self.sphere_dim, kmax)
        if self.kind == "product":
            return product_square_spectrum(
                self.base_spectrum, sphere_spectrum(self.sphere_dim, kmax), cutoff)
        raise ContractViolation(f"unknown model kind {self.kind!r}")


def circle_spectrum(spin: SpinStructure, c: float, band: int) -> SpectrumSample:
    """Twisted circle spectrum {k + 1/2 + s*c} (bounding) or {k + s*c}
    (non-bounding) for |k| <= band, each with multiplicity one.  The
    Clifford sign s is fixed in ``conventions``."""
    if band < 1:
        raise ContractViolation("band must be >= 1")
    offset = 0.5 if spin is SpinStructure.BOUNDING else 0.0
    shift = CLIFFORD_SIGN * float(c)
    vals = [k + offset + shift for k in range(-band, band + 1)]
    return SpectrumSample.from_eigenvalues(vals, band=band)


def _sphere_multiplicity(l: int, k: int) -> int:
    return 2 ** (l // 2) * math.comb(k + l - 1, k)


def sphere_spectrum(l: int, kmax: int) -> SpectrumSample:
    """Round unit sphere of dimension l >= 2: eigenvalues +-(l/2 + k),
    k = 0..kmax, multiplicity 2^floor(l/2) * C(k+l-1, k)."""
    if l < 2:
        raise ContractViolation("sphere dimension must be >= 2; use circle_spectrum for l = 1")
    if kmax < 0:
        raise ContractViolation("kmax must be >= 0")
    pairs = []
    for k in range(kmax + 1):
        lam = l / 2.0 + k
        mult = _sphere_multiplicity(l, k)
        pairs.append((-lam, mult))
        pairs.append((lam, mult))
    pairs.sort()
    return SpectrumSample(pairs=tuple(pairs), band=int(math.ceil(l / 2.0 + kmax)),
                          symmetric=True)


def _symmetric_part(s: SpectrumSample, name: str) -> SpectrumSample:
    """Drop unpaired truncation-edge eigenvalues; reject genuinely
    asymmetric spectra (more than 2*EDGE_EXCLUSION unpaired values)."""
    kept = tuple((lam, m) for lam, m in s.pairs if s.find_multiplicity(-lam) == m)
    dropped = sum(m for _, m in s.pairs) - sum(m for _, m in kept)
    if dropped > 2 * EDGE_EXCLUSION or not kept:
        raise ContractViolation(f"{name} spectrum is not symmetric")
    return SpectrumSample(pairs=kept, band=s.band, grouping_tol=s.grouping_tol,
                          symmetric=True)


def product_square_spectrum(base: SpectrumSample, sphere: SpectrumSample,
                            cutoff: float) -> SpectrumSample:
    """Spectrum of the squared operator on a product: all sums mu^2 + nu^2
    with product multiplicities, truncated at ``cutoff``.  Both factors
    must be symmetric spectra (unpaired truncation-edge values are
    dropped); the minimum is at least min(nu^2)."""
    if not base.pairs or not sphere.pairs:
        raise ContractViolation("empty factor spectrum")
    base = _symmetric_part(base, "base")
    sphere = _symmetric_part(sphere, "sphere")
    sums: dict = {}
    for mu, mmu in base.pairs:
        for nu, mnu in sphere.pairs:
            s2 = mu * mu + nu * nu
            if s2 <= cutoff:
                key = round(s2 / GROUPING_TOL)
                val, m = sums.get(key, (s2, 0))
                sums[key] = (val, m + mmu * mnu)
    if not sums:
        raise ContractViolation("cutoff excludes the entire product spectrum")
    pairs = sorted(sums.values())
    return SpectrumSample(pairs=tuple(pairs), band=int(math.ceil(cutoff)))


def _interior_values(sample: SpectrumSample, lo: float, hi: float) -> np.ndarray:
    v = sample.values()
    return v[(v >= lo) & (v <= hi)]


def spectra_match(a: SpectrumSample, b: SpectrumSample, tol: float) -> bool:
    """Compare two samples after excluding truncation edges.

    The outermost ``EDGE_EXCLUSION`` eigenvalues on each side of each
    sample are dropped; the remaining windows are intersected, nudged off
    the eigenvalue grid by a quarter of the median gap, and clipped to
    |lambda| <= min(band) - EDGE_EXCLUSION.  Samples too small to leave an
    interior compare as equal (there is nothing trustworthy to compare).
    """
    va, vb = a.values(), b.values()
    k = EDGE_EXCLUSION
    if len(va) <= 2 * k or len(vb) <= 2 * k:
        return True
    lo = max(va[k], vb[k])
    hi = min(va[-k - 1], vb[-k - 1])
    combined = np.sort(np.concatenate([va, vb]))
    gaps = np.diff(combined)
    gaps = gaps[gaps > 10 * tol]
    pad = 0.25 * float(np.median(gaps)) if gaps.size else 0.0
    lo, hi = lo + pad, hi - pad
    band_limit = min(a.band, b.band) - EDGE_EXCLUSION
    lo, hi = max(lo, -band_limit), min(hi, band_limit)
    if lo >= hi:
        return True
    wa, wb = _interior_values(a, lo, hi), _interior_values(b, lo, hi)
    if len(wa) != len(wb):
        return False
    if len(wa) == 0:
        return True
    return bool(np.max(np.abs(wa - wb)) <= tol)


def check_twist_periodicity(spectra_fn: Callable[[float], SpectrumSample],
                            c: float, tol: float = DEFAULT_TOL) -> bool:
    """True when the spectra at twist c and c + 1 agree away from the
    truncation edges."""
    return spectra_match(spectra_fn(c), spectra_fn(c + 1.0), tol)


def check_exact_twist_invariance(spectra_fn: Callable[[float], SpectrumSample],
                                 c: float, tol: float = DEFAULT_TOL) -> bool:
    """True when the spectrum at twist c agrees with the untwisted one.
    Holds whenever the twisting 1-form is exact (a gauge conjugation)."""
    return spectra_match(spectra_fn(c), spectra_fn(0.0), tol)


def lichnerowicz_bound_check(spectrum_sq: SpectrumSample, kappa_min: float,
                             tol: float = DEFAULT_TOL) -> bool:
    """Check the squared spectrum against the scalar-curvature bound
    min >= kappa_min / 4 - tol.  The twisting connection is flat, so the
    twist contributes no curvature term."""
    vals = spectrum_sq.eigenvalues()
    if np.any(vals < -tol):
        raise ContractViolation("squared spectrum has negative entries")
    return bool(vals.min() >= kappa_min / 4.0 - tol)
