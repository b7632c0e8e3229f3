import math

import numpy as np
import pytest

from neutralctl import (
    KernelSegment,
    NeutralSystem,
    SingularAtEvaluationPoint,
    SpectrumRegion,
    count_zeros,
    default_region,
    delta,
    delta_derivative,
    det_logderiv,
    find_roots,
    predict_chains,
    roots_to_csv,
    spectral_abscissa,
    spectral_right_bound,
)
from neutralctl.spectrum import delta_many

Z2 = np.zeros((2, 2))


def scalar_system(a_minus1=0.0, a0=0.0, a1=0.0):
    return NeutralSystem(
        n=1, m=1, p=0, A_minus1=[[a_minus1]], A0=[[a0]], A1=[[a1]], B=[[1]]
    )


def kernel_system():
    rng = np.random.default_rng(42)
    return NeutralSystem(
        n=2, m=1, p=0,
        A_minus1=0.2 * rng.standard_normal((2, 2)),
        A0=rng.standard_normal((2, 2)),
        A1=0.5 * rng.standard_normal((2, 2)),
        B=[[1], [0]],
        kernels=(
            KernelSegment(-0.8, -0.3, 0.3 * rng.standard_normal((2, 2)), rng.standard_normal((2, 2))),
            KernelSegment(-0.2, 0.0, 0.2 * rng.standard_normal((2, 2)), 0.4 * rng.standard_normal((2, 2))),
        ),
    )


def test_delta_example3_closed_form(ex3):
    for lam in (0.7 + 0.3j, -1.2 + 4.0j, 2.0):
        D = delta(ex3, lam)
        expected = np.array(
            [[lam, -lam * np.exp(-lam) - 1.0], [0.0, lam]], dtype=complex
        )
        assert np.allclose(D, expected, atol=1e-14)


def test_delta_example5_closed_form(ex5):
    for lam in (0.7 + 0.3j, -0.4 - 2.0j):
        D = delta(ex5, lam)
        expected = np.array(
            [[lam - lam * np.exp(-lam), 0.0], [-1.0, lam]], dtype=complex
        )
        assert np.allclose(D, expected, atol=1e-14)


def test_delta_at_zero_kills_lambda_terms():
    sys = kernel_system()
    D0 = delta(sys, 0.0)
    expected = -sys.A0 - sys.A1
    for seg in sys.kernels:
        expected = expected - (seg.b - seg.a) * seg.A3
    assert np.allclose(D0, expected, atol=1e-14)


def test_delta_derivative_trivial():
    sys = scalar_system()
    assert np.allclose(delta_derivative(sys, 0.37 + 0.1j), [[1.0]])


def test_delta_derivative_example5_at_zero(ex5):
    assert np.allclose(delta_derivative(ex5, 0.0), [[0.0, 0.0], [0.0, 1.0]])


@pytest.mark.parametrize("case", ["ex5", "kern"])
def test_delta_derivative_matches_finite_differences(case, ex5):
    sys = ex5 if case == "ex5" else kernel_system()
    rng = np.random.default_rng(17)
    for _ in range(20):
        lam = complex(*(2.0 * rng.standard_normal(2)))
        eps = 1e-5 * (1.0 + abs(lam))
        fd = (delta(sys, lam + eps) - delta(sys, lam - eps)) / (2.0 * eps)
        an = delta_derivative(sys, lam)
        scale = np.max(np.abs(an)) + 1.0
        assert np.max(np.abs(fd - an)) / scale < 1e-8


def test_kernel_series_continuity():
    # the series branch agrees with the closed form just inside the cut
    from neutralctl.spectrum import _phi_many, _phi_prime_many

    lam = 0.99e-4 + 0.3e-4j  # below the cut, series branch active
    for a, b in ((-0.8, -0.3), (-0.2, 0.0), (-1.0, 0.0)):
        series = _phi_many(np.array([lam]), a, b)[0]
        direct = (np.exp(lam * b) - np.exp(lam * a)) / lam
        assert abs(series - direct) < 1e-14
        series = _phi_prime_many(np.array([lam]), a, b)[0]
        direct = ((b * np.exp(lam * b) - a * np.exp(lam * a)) * lam
                  - (np.exp(lam * b) - np.exp(lam * a))) / lam**2
        assert abs(series - direct) < 1e-10


def test_constant_derivative_kernel_reduces_to_discrete_taps():
    # integral of M dz(t+s) over [-1, 0] telescopes to M z(t) - M z(t-1)
    M = np.array([[0.2, -0.1], [0.4, 0.3]])
    base = dict(n=2, m=1, p=0, A_minus1=[[0.3, 0.0], [0.0, 0.1]], B=[[1], [0]])
    with_kernel = NeutralSystem(
        A0=Z2, A1=Z2, kernels=(KernelSegment(-1.0, 0.0, M, np.zeros((2, 2))),), **base
    )
    discrete = NeutralSystem(A0=M, A1=-M, **base)
    lams = np.array([0.3 + 1j, -0.2 - 3j, 1e-6 + 0j, 2.0 + 0j])
    assert np.allclose(delta_many(with_kernel, lams), delta_many(discrete, lams), atol=1e-12)


def test_det_logderiv_scalar():
    sys = scalar_system()
    det, logd = det_logderiv(sys, 0.5 + 0.25j)
    assert abs(det - (0.5 + 0.25j)) < 1e-14
    assert abs(logd - 1.0 / (0.5 + 0.25j)) < 1e-12


def test_det_logderiv_example_determinants(ex3, ex5):
    for lam in (0.3 + 1.1j, -0.7 + 2.0j):
        det3, _ = det_logderiv(ex3, lam)
        assert abs(det3 - lam**2) < 1e-12 * (1 + abs(lam) ** 2)
        det5, _ = det_logderiv(ex5, lam)
        oracle = lam**2 * (1.0 - np.exp(-lam))
        assert abs(det5 - oracle) < 1e-12 * (1 + abs(oracle))


def test_det_logderiv_singular(ex3):
    with pytest.raises(SingularAtEvaluationPoint):
        det_logderiv(ex3, 0.0)


def test_count_zeros_example5(ex5):
    assert count_zeros(ex5, SpectrumRegion(-1, 1, -7, 7)) == 5


def test_count_zeros_example3(ex3):
    assert count_zeros(ex3, SpectrumRegion(-1, 1, -1, 1)) == 2


def test_count_zeros_empty_window():
    sys = scalar_system(a0=-1.0)  # only root at -1
    assert count_zeros(sys, SpectrumRegion(1.0, 2.0, -1.0, 1.0)) == 0


def test_find_roots_example5_wide(ex5):
    roots = find_roots(ex5, SpectrumRegion(-1, 1, -40, 40))
    assert sum(r.multiplicity for r in roots) == 15
    by_k = {}
    for r in roots:
        k = round(r.lam.imag / (2 * math.pi))
        by_k[k] = r
    assert by_k[0].multiplicity == 3
    assert abs(by_k[0].lam) < 1e-8
    for k in range(-6, 7):
        if k == 0:
            continue
        r = by_k[k]
        assert r.multiplicity == 1
        assert abs(r.lam - 2j * math.pi * k) < 1e-8
        assert r.residual < 1e-10


def test_find_roots_example3(ex3):
    roots = find_roots(ex3, SpectrumRegion(-2, 2, -10, 10))
    assert len(roots) == 1
    assert roots[0].multiplicity == 2
    assert abs(roots[0].lam) < 1e-9


def test_find_roots_scalar_exponential():
    roots = find_roots(scalar_system(a0=-1.0), SpectrumRegion(-2, 2, -3, 3))
    assert len(roots) == 1
    assert roots[0].multiplicity == 1
    assert abs(roots[0].lam + 1.0) < 1e-10


def test_find_roots_symmetrizes_region(ex5):
    # an asymmetric window is reflected about the real axis before searching
    roots = find_roots(ex5, SpectrumRegion(-1, 1, -1, 8))
    ims = sorted(round(r.lam.imag, 6) for r in roots)
    assert ims == [-round(2 * math.pi, 6), 0.0, round(2 * math.pi, 6)]


def test_find_roots_conjugate_symmetry(ex5):
    roots = find_roots(ex5, SpectrumRegion(-1, 1, -20, 20))
    lams = sorted((r.lam.real, r.lam.imag) for r in roots)
    mirrored = sorted((r.lam.real, -r.lam.imag) for r in roots)
    assert lams == mirrored


def test_find_roots_sum_matches_count(ex5):
    region = SpectrumRegion(-1, 1, -15, 15)
    roots = find_roots(ex5, region)
    assert sum(r.multiplicity for r in roots) == count_zeros(ex5, region.symmetrized())


def test_find_roots_thread_determinism(ex5):
    region = SpectrumRegion(-1, 1, -15, 15)
    r1 = find_roots(ex5, region, threads=1)
    r4 = find_roots(ex5, region, threads=4)
    assert [(r.lam, r.multiplicity, r.residual) for r in r1] == [
        (r.lam, r.multiplicity, r.residual) for r in r4
    ]


def test_predict_chains_example5(ex5):
    chains = predict_chains(ex5)
    assert len(chains) == 1
    c = chains[0]
    assert c.abscissa == 0.0 and c.phase == 0.0 and c.multiplicity == 1
    assert c.predict(3) == 6j * math.pi


def test_predict_chains_nilpotent(ex3):
    assert predict_chains(ex3) == []


def test_predict_chains_abscissa():
    sys = NeutralSystem(
        n=2, m=1, p=0, A_minus1=np.diag([math.exp(-1.0), 0.0]), A0=Z2, A1=Z2, B=[[1], [0]]
    )
    chains = predict_chains(sys)
    assert len(chains) == 1
    assert abs(chains[0].abscissa + 1.0) < 1e-14


def test_predict_chains_collapses_repeats():
    sys = NeutralSystem(n=2, m=1, p=0, A_minus1=np.diag([0.5, 0.5]), A0=Z2, A1=Z2, B=[[1], [0]])
    chains = predict_chains(sys)
    assert len(chains) == 1
    assert chains[0].multiplicity == 2


def test_chain_deviation_decays_like_one_over_k():
    # genuine O(1/k) deviation needs a retarded perturbation of the pure chain
    sys = scalar_system(a_minus1=0.5, a0=0.3)
    top = 2 * math.pi * 16 + 1.0
    roots = find_roots(sys, SpectrumRegion(-1.5, 0.5, -top, top))
    devs = {}
    for r in roots:
        k = round(r.lam.imag / (2 * math.pi))
        if k > 0:
            devs[k] = abs(r.lam.real - math.log(0.5))
    ks = sorted(devs)
    assert ks[-1] >= 15
    C = max(devs[k] * k for k in ks if 3 <= k <= 6)
    for k in ks:
        if k >= 3:
            assert devs[k] <= 1.3 * C / k + 1e-9


def test_spectral_abscissa_examples(ex3, ex5):
    region = SpectrumRegion(-2, 2, -14, 14)
    val5, _ = spectral_abscissa(ex5, region)
    assert abs(val5) < 1e-8
    val3, _ = spectral_abscissa(ex3, region)
    assert abs(val3) < 1e-8
    val1, _ = spectral_abscissa(scalar_system(a0=-1.0), region)
    assert abs(val1 + 1.0) < 1e-8


def test_spectral_abscissa_rejects_narrow_region(ex5):
    with pytest.raises(ValueError):
        spectral_abscissa(ex5, SpectrumRegion(-1, 1, -3, 3))


def test_spectral_right_bound_holds(ex3, ex5):
    for sys in (ex3, ex5, scalar_system(a0=2.0)):
        bound = spectral_right_bound(sys)
        region = SpectrumRegion(-3, bound + 1.0, -14, 14)
        val, qual = spectral_abscissa(sys, region)
        assert val <= bound + 1e-9
        assert qual == "exact"


def test_default_region_covers_chains(ex5):
    region = default_region(ex5)
    assert region.re_min <= -2.0 and region.re_max >= 2.0
    assert region.im_max >= 20 * math.pi


def test_roots_to_csv(ex3):
    roots = find_roots(ex3, SpectrumRegion(-2, 2, -10, 10))
    text = roots_to_csv(roots)
    lines = text.strip().split("\n")
    assert lines[0] == "re,im,multiplicity,residual"
    assert len(lines) == 2
    assert ",2," in lines[1]
