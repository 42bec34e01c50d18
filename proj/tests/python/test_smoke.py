import math

import numpy as np
import pytest

import pdirac


PI = math.pi


@pytest.fixture(scope="module")
def cube():
    return pdirac.TorusModel(3, [4, 4, 4], twist=[0.5, 0.0, 0.0])


@pytest.fixture(scope="module")
def dirac(cube):
    return pdirac.DiracOperator(cube)


def test_gamma_relations():
    for m in range(2, 7):
        g = pdirac.build_gamma(m)
        assert g.spinor_dim == 2 ** (m // 2)
        assert pdirac.check_relations(g) < 1e-14
    gamma0 = pdirac.build_gamma(3).gamma(0)
    assert np.allclose(gamma0 @ gamma0, -np.eye(2))


def test_spectrum_closed_form():
    model = pdirac.TorusModel(3, [4, 4, 4], twist=[0.5, 0.5, 0.5])
    op = pdirac.DiracOperator(model)
    entries = op.spectrum(2)
    assert entries[0].eigenvalue == pytest.approx(PI * math.sqrt(3.0), rel=1e-12)
    assert entries[0].multiplicity == 8


def test_field_numpy_roundtrip(cube, dirac):
    f = pdirac.random_field(cube, dirac.spinor_dim, seed=7)
    arr = f.values
    assert arr.shape == (4, 4, 4, 2)
    g = pdirac.field_from_array(cube, dirac.spinor_dim, arr)
    assert np.array_equal(g.values, arr)
    assert pdirac.lp_norm(f, 2.0) > 0.0


def test_operator_action_on_constants(cube, dirac):
    ones = pdirac.field_from_array(
        cube, dirac.spinor_dim, np.stack([np.ones((4, 4, 4)), np.zeros((4, 4, 4))], axis=-1)
    )
    assert pdirac.lp_norm(ones, 3.0) == pytest.approx(1.0, rel=1e-13)
    assert dirac.sobolev_norm(ones, 2.0) == pytest.approx(PI, rel=1e-12)
    assert dirac.h1p_norm(ones, 2.0) == pytest.approx(math.sqrt(1 + PI * PI), rel=1e-12)


def test_min_eigen_quadratic():
    model = pdirac.TorusModel(3, [4, 4, 4], twist=[0.5, 0.5, 0.5])
    op = pdirac.DiracOperator(model)
    cfg = pdirac.EigenConfig()
    cfg.restarts = 2
    pair = pdirac.min_eigen(op, cfg)
    assert pair.accepted
    assert pair.lam == pytest.approx(3.0 * PI * PI, rel=1e-8)


def test_energy_constant_branch(dirac):
    energy = pdirac.Energy(dirac, 2.0, pdirac.Nonlinearity.power(1.0, 4.0))
    assert energy.classification().superlinear()
    branch = pdirac.constant_branch_point(energy)
    assert branch.value == pytest.approx(PI**4 / 4.0, rel=1e-12)
    assert branch.grad_residual < 1e-8


def test_mountain_pass_seeded(dirac):
    energy = pdirac.Energy(dirac, 2.0, pdirac.Nonlinearity.power(1.0, 4.0))
    cfg = pdirac.SolveConfig()
    cfg.max_iter = 4000
    point = pdirac.mountain_pass(energy, cfg, pdirac.constant_branch(energy))
    assert point.accepted
    assert point.value == pytest.approx(PI**4 / 4.0, rel=1e-6)
    rep = pdirac.ps_diagnostic(energy, point.trace)
    assert rep.bounded


def test_sublinear_minimize(dirac):
    energy = pdirac.Energy(dirac, 2.0, pdirac.Nonlinearity.power(1.0, 1.5))
    cfg = pdirac.SolveConfig()
    point = pdirac.global_minimize(energy, cfg)
    assert point.accepted
    assert point.value < 0.0
    assert point.value <= PI**-6 * (0.5 - 2.0 / 3.0) + 1e-8
