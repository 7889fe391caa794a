import cmath
import math

import numpy as np
import pytest

from spinspec.discretize import (Scheme, WeightFunction,
                                 build_circle_dirac, cover_operator_sections,
                                 fourier_laplace_family, gauge_conjugate,
                                 grid_angles, mass_doubled, period_symbol,
                                 spectrum_sample)
from spinspec.errors import ContractViolation
from spinspec.floquet import symbol_eval
from spinspec.conventions import twist_to_floquet
from spinspec.linalg import hermitian_eigenvalues, numeric_kernel_dim, singular_values
from spinspec.spectra import SpinStructure, circle_spectrum, spectra_match

BOUND = SpinStructure.BOUNDING
NONBOUND = SpinStructure.NONBOUNDING


def closed_form_values(n, spin, c):
    mu = np.arange(-n // 2, n // 2) + (0.5 if spin is BOUND else 0.0)
    return np.sort(-mu - c)


class TestBuildCircleDirac:
    def test_spectral_bounding_exact(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.0)
        eig = hermitian_eigenvalues(d.matrix).eigenvalues
        assert np.max(np.abs(eig - closed_form_values(16, BOUND, 0.0))) < 1e-12

    def test_spectral_nonbounding_kernel(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, NONBOUND, 0.0)
        assert numeric_kernel_dim(d.matrix, 1e-10) == 1

    def test_spectral_bounding_half_twist_kernel(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.5)
        assert numeric_kernel_dim(d.matrix, 1e-10) == 1

    @pytest.mark.parametrize("spin", [BOUND, NONBOUND])
    @pytest.mark.parametrize("c", [-1.7, -0.5, 0.0, 0.25, 2.9])
    @pytest.mark.parametrize("n", [8, 16])
    def test_spectral_scheme_matches_closed_form_grid(self, spin, c, n):
        d = build_circle_dirac(n, Scheme.SPECTRAL, spin, c)
        eig = hermitian_eigenvalues(d.matrix).eigenvalues
        assert np.max(np.abs(eig - closed_form_values(n, spin, c))) < 1e-12

    def test_spectral_matches_circle_spectrum_interior(self):
        n = 32
        d = build_circle_dirac(n, Scheme.SPECTRAL, BOUND, 0.4)
        sample = spectrum_sample(d.matrix, band=n // 2)
        closed = circle_spectrum(BOUND, 0.4, n // 2)
        assert spectra_match(sample, closed, tol=1e-10)

    def test_central_difference_second_order(self):
        errors = []
        for n in (64, 128):
            d = build_circle_dirac(n, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
            eig = hermitian_eigenvalues(d.matrix).eigenvalues
            errors.append(0.5 - eig[eig > 0].min())
        order = math.log2(errors[0] / errors[1])
        assert order > 1.9
        # Richardson extrapolation lands on the continuum value
        extrapolated = eig[eig > 0].min() + (errors[1] * 4 - errors[1] * 4) / 3
        richardson = (4 * (0.5 - errors[1]) - (0.5 - errors[0])) / 3
        assert abs(richardson - 0.5) < 1e-6

    def test_rejects_odd_or_tiny_grid(self):
        with pytest.raises(ContractViolation):
            build_circle_dirac(7, Scheme.SPECTRAL, BOUND, 0.0)
        with pytest.raises(ContractViolation):
            build_circle_dirac(4, Scheme.SPECTRAL, BOUND, 0.0)

    def test_matrices_are_hermitian(self):
        for scheme in Scheme:
            d = build_circle_dirac(16, scheme, BOUND, 0.3)
            assert np.linalg.norm(d.matrix - d.matrix.conj().T) < 1e-12


class TestGaugeConjugate:
    def test_zero_weight_is_identity(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.0)
        u = WeightFunction.periodic(np.zeros(16))
        assert np.array_equal(gauge_conjugate(d, u, 0.7), d.matrix)

    @pytest.mark.parametrize("c", [0.4, 10.0])
    def test_isospectral(self, c):
        n = 32
        d = build_circle_dirac(n, Scheme.SPECTRAL, BOUND, 0.0)
        u = WeightFunction.periodic(np.sin(grid_angles(n)))
        g = gauge_conjugate(d, u, c)
        a = hermitian_eigenvalues(d.matrix).eigenvalues
        b = hermitian_eigenvalues(g).eigenvalues
        assert np.max(np.abs(a - b)) < 1e-10

    def test_preserves_hermiticity(self):
        n = 16
        d = build_circle_dirac(n, Scheme.CENTRAL_DIFFERENCE, NONBOUND, 0.0)
        g = gauge_conjugate(d, WeightFunction.periodic(np.cos(grid_angles(n))), 1.3)
        assert np.linalg.norm(g - g.conj().T) < 1e-12

    def test_rejects_winding_weight(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.0)
        with pytest.raises(ContractViolation):
            gauge_conjugate(d, WeightFunction.standard(16, degree=1), 0.4)


class TestFourierLaplaceFamily:
    def test_z_one_is_identity(self):
        d = build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        fl = fourier_laplace_family(d, WeightFunction.standard(16), 1.0)
        assert np.allclose(fl.matrix, d.matrix)

    @pytest.mark.parametrize("c", [0.3, -0.9, 2.4])
    def test_spectral_scheme_reproduces_twist_exactly(self, c):
        n = 32
        d = build_circle_dirac(n, Scheme.SPECTRAL, BOUND, 0.0)
        fl = fourier_laplace_family(d, WeightFunction.standard(n), cmath.exp(-1j * c))
        built = build_circle_dirac(n, Scheme.SPECTRAL, BOUND, c)
        assert np.max(np.abs(fl.matrix - built.matrix)) < 1e-12

    def test_central_scheme_kernel_location_converges(self):
        # the conjugated family has its kernel exactly at c = 1/2; the
        # scalar-shift twist has it at 1/2 + O(h^2); their smallest
        # |eigenvalue| agree to O(h) at matching twists
        for n, bound in ((32, 0.05), (64, 0.02)):
            d = build_circle_dirac(n, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
            fl = fourier_laplace_family(d, WeightFunction.standard(n),
                                        cmath.exp(-1j * 0.5))
            g = np.min(np.abs(hermitian_eigenvalues(fl.matrix).eigenvalues))
            built = build_circle_dirac(n, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.5)
            gb = np.min(np.abs(hermitian_eigenvalues(built.matrix).eigenvalues))
            assert g < 1e-12  # conjugated: exact kernel at the half twist
            assert abs(gb - g) < bound

    def test_large_modulus_is_invertible_and_nonhermitian(self):
        n = 16
        d = build_circle_dirac(n, Scheme.SPECTRAL, BOUND, 0.0)
        fl = fourier_laplace_family(d, WeightFunction.standard(n), 2.0)
        assert np.linalg.norm(fl.matrix - fl.matrix.conj().T) > 1e-3
        assert singular_values(fl.matrix)[-1] > 0.5  # ln 2 gap

    def test_hermitian_iff_unit_modulus(self):
        n = 16
        d = build_circle_dirac(n, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        f = WeightFunction.standard(n)
        on = fourier_laplace_family(d, f, cmath.exp(1j * 0.7)).matrix
        off = fourier_laplace_family(d, f, 1.1 * cmath.exp(1j * 0.7)).matrix
        assert np.linalg.norm(on - on.conj().T) < 1e-12
        assert np.linalg.norm(off - off.conj().T) > 1e-6

    def test_branch_shift_equals_twist_shift(self):
        # moving to the adjacent ln-branch adds a full angular period to
        # the twist: exactly 2*pi times the weight slope
        n = 16
        d = build_circle_dirac(n, Scheme.SPECTRAL, BOUND, 0.0)
        f = WeightFunction.standard(n)
        z = cmath.exp(-1j * 0.3)
        a = fourier_laplace_family(d, f, z, branch=0)
        b = fourier_laplace_family(d, f, z, branch=1)
        assert np.max(np.abs((b.matrix - a.matrix) - 2.0 * np.pi * np.eye(n))) < 1e-12

    def test_unit_twist_shift_is_isospectral(self):
        # the discrete restatement of twist periodicity: multiplying z by
        # e^{-i} shifts the twist by one and preserves the spectrum
        n = 32
        for scheme in Scheme:
            d = build_circle_dirac(n, scheme, BOUND, 0.0)
            f = WeightFunction.standard(n)
            z = cmath.exp(-1j * 0.37)
            a = fourier_laplace_family(d, f, z).matrix
            b = fourier_laplace_family(d, f, z * cmath.exp(-1j)).matrix
            ea = hermitian_eigenvalues(a).eigenvalues
            eb = hermitian_eigenvalues(b).eigenvalues
            sa = spectrum_sample(a, band=n // 2)
            sb = spectrum_sample(b, band=n // 2)
            assert spectra_match(sa, sb, tol=1e-9)

    def test_rejects_zero_z_and_twisted_input(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.0)
        with pytest.raises(ContractViolation):
            fourier_laplace_family(d, WeightFunction.standard(16), 0.0)
        twisted = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.5)
        with pytest.raises(ContractViolation):
            fourier_laplace_family(twisted, WeightFunction.standard(16), 1.0)


class TestCoverSections:
    def test_single_period_is_interior_block(self):
        d = build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        one = cover_operator_sections(d, 1)
        two = cover_operator_sections(d, 2)
        assert np.array_equal(one, two[:16, :16])

    def test_bounding_sections_decay(self):
        d = build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        sigmas = [singular_values(cover_operator_sections(d, L))[-1]
                  for L in (4, 8, 16, 32)]
        assert all(b < a for a, b in zip(sigmas, sigmas[1:]))
        assert sigmas[-1] < sigmas[0] / 4.0

    def test_massive_sections_stay_invertible(self):
        d = build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        dm = mass_doubled(d.matrix, 1.0)
        sigmas = [singular_values(cover_operator_sections(dm, L))[-1]
                  for L in (4, 8, 16, 32)]
        assert min(sigmas) > 0.5

    def test_rejects_zero_periods(self):
        d = build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        with pytest.raises(ContractViolation):
            cover_operator_sections(d, 0)


class TestPeriodSymbol:
    @pytest.mark.parametrize("spin", [BOUND, NONBOUND])
    def test_floquet_point_matches_conjugated_family(self, spin):
        n = 32
        d = build_circle_dirac(n, Scheme.CENTRAL_DIFFERENCE, spin, 0.0)
        s = period_symbol(d)
        assert s.hermitian_symmetric
        for c in (0.0, 0.23, 0.5, -0.7):
            a = symbol_eval(s, twist_to_floquet(c))
            fl = fourier_laplace_family(d, WeightFunction.standard(n),
                                        cmath.exp(-1j * c))
            ea = hermitian_eigenvalues(a).eigenvalues
            ef = hermitian_eigenvalues(fl.matrix).eigenvalues
            assert np.max(np.abs(ea - ef)) < 1e-10

    def test_quotient_is_unit_floquet_point(self):
        d = build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        s = period_symbol(d)
        assert np.allclose(symbol_eval(s, 1.0), d.matrix)

    def test_mass_doubled_symbol_is_gapped(self):
        from spinspec.floquet import min_singular_on_circle
        d = build_circle_dirac(8, Scheme.CENTRAL_DIFFERENCE, BOUND, 0.0)
        s = period_symbol(mass_doubled(d.matrix, 1.0))
        value, _ = min_singular_on_circle(s, grid=64)
        assert value > 0.9


class TestSpectrumSampleHelper:
    def test_band_defaults_to_extent(self):
        d = build_circle_dirac(16, Scheme.SPECTRAL, BOUND, 0.0)
        sample = spectrum_sample(d.matrix)
        assert sample.band == 8

    def test_weight_validation(self):
        with pytest.raises(ContractViolation):
            WeightFunction(values=np.array([[1.0]]), degree=0)
        lift = WeightFunction.standard(8, degree=2)
        assert lift.lifted(8) - lift.lifted(0) == pytest.approx(4 * np.pi)
