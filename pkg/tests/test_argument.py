import numpy as np
import pytest
from hypothesis import given, strategies as st

from holotransit.argument import zero_count
from holotransit.errors import NonIntegerResidual, ZeroOnContour
from holotransit.geometry import ClosedPolyline, circle
from holotransit.symbols import Mobius
from holotransit.witness import build_proof_comb
from tests.oracles import dense_argument_count


def test_two_zeros_inside_unit_circle():
    f = lambda z: (z - 0.2) * (z - 0.5)
    zc = zero_count(f, circle(0, 1, 256))
    assert zc == 2 and zc.residual < 1e-6
    assert dense_argument_count(f, 0, 1) == pytest.approx(2, abs=1e-9)


def test_zero_outside_and_clockwise():
    assert zero_count(lambda z: z, circle(3, 1)) == 0
    assert zero_count(lambda z: z, circle(0, 1, clockwise=True)) == -1


def test_zero_on_contour():
    with pytest.raises(ZeroOnContour):
        zero_count(lambda z: z - 1, circle(0, 1, 64))


def test_coarse_curve_is_subdivided_not_misread():
    # 8 vertices around 5 zeros: each edge turns the argument by more than pi
    f = lambda z: z ** 5
    c = circle(0, 1, 8)
    assert zero_count(f, c) == 5


def test_branch_cut_is_rejected():
    # the principal square root jumps by pi across the negative axis; bisection never settles
    with pytest.raises(NonIntegerResidual):
        zero_count(np.sqrt, circle(0, 1, 16))


def test_comb_examples():
    g = build_proof_comb(0, (), 1.0)
    assert zero_count(g, circle(0, 1)) == 1
    g = build_proof_comb(2, (0,), 1.0)
    assert zero_count(g, circle(0, 0.5)) == -1
    assert zero_count(g, circle(2, 0.5)) == 2
    assert dense_argument_count(g, 0, 0.5) == pytest.approx(-1, abs=1e-9)
    assert dense_argument_count(g, 2, 0.5) == pytest.approx(2, abs=1e-9)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_comb_normalization(p):
    poles = tuple(0.6 * np.exp(2j * np.pi * k / p) for k in range(p))
    g = build_proof_comb(0.1 + 0.1j, poles, 2.5)
    assert zero_count(g, circle(0, 1.5)) == 1
    assert zero_count(g, circle(0.1 + 0.1j, 0.2)) == p + 1
    for a in poles:
        assert zero_count(g, circle(a, 0.1)) == -1


def test_comb_derivative_matches_log_derivative():
    g = build_proof_comb(0.3, (2, -2j), 1.7)
    z = np.array([0.5 + 0.5j, -1.0, 1j])
    assert np.allclose(g.derivative(z) / g(z), g.log_derivative(z))


@given(st.integers(0, 10_000))
def test_transfer_identity(seed):
    rng = np.random.default_rng(seed)
    a = complex(*rng.uniform(-0.6, 0.6, 2))
    theta = rng.uniform(0, 2 * np.pi)
    phi = Mobius(np.exp(1j * theta), -np.exp(1j * theta) * a, -np.conj(a), 1)   # disk automorphism
    zeros = rng.uniform(-0.7, 0.7, (2, 2)) @ [1, 1j]
    f = lambda w: (w - zeros[0]) * (w - zeros[1])
    gamma = circle(0, 0.8, 256)
    try:
        lhs = zero_count(lambda z: f(phi(z)), gamma)
        rhs = zero_count(f, ClosedPolyline(phi(gamma.vertices)))
    except ZeroOnContour:
        return
    assert lhs.count == rhs.count
    assert lhs.residual < 1e-3 and rhs.residual < 1e-3
