import numpy as np
import pytest
from scipy.linalg import expm

from qchip.chip import Branch, ChipPoint, boundary_q, chip_bloch
from qchip.errors import OutOfRange, SingularParameter
from qchip.liouvillian import (
    Trajectory,
    boundary_distribution,
    boundary_state,
    chip_entropy,
    combined_generator,
    combined_generator_closed_form,
    combined_generator_from_log,
    distribution_entropy,
    evolve_boundary,
    is_backward_stochastic,
    is_stochastic,
    jump_operators,
    lindblad_rhs,
    marginal_generators,
    max_chip_entropy,
)
from qchip.phase_space import BasisKind
from qchip.qubit import von_neumann_entropy

STEP = 1e-6


def wootters_border(p, branch):
    q = boundary_q(p, branch, BasisKind.WOOTTERS)
    return chip_bloch(ChipPoint(p=p, q=q, basis_kind=BasisKind.WOOTTERS)).array()


def test_marginal_generators_at_quarter():
    first, second = marginal_generators(0.25)
    assert first.rate == pytest.approx(2)
    assert second.rate == pytest.approx(-0.5 / (0.75 * 0.625))
    for generator in (first, second):
        np.testing.assert_allclose(generator.matrix.sum(axis=0), 0)
        np.testing.assert_allclose(generator.matrix.sum(axis=1), 0)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.4])
def test_first_rate_is_antisymmetric(p):
    assert marginal_generators(p)[0].rate == pytest.approx(-marginal_generators(1 - p)[0].rate)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.7, 0.9])
@pytest.mark.parametrize("branch", list(Branch))
def test_marginal_generators_follow_border(p, branch):
    first, second = marginal_generators(p)
    q = boundary_q(p, branch, BasisKind.WOOTTERS)
    dq = (
        boundary_q(p + STEP, branch, BasisKind.WOOTTERS)
        - boundary_q(p - STEP, branch, BasisKind.WOOTTERS)
    ) / (2 * STEP)
    np.testing.assert_allclose(first.matrix @ [p, 1 - p], [1, -1], atol=1e-9)
    np.testing.assert_allclose(second.matrix @ [q, 1 - q], [dq, -dq], atol=1e-6)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.4, 0.6, 0.9])
def test_combined_generator_forms(p):
    generator = combined_generator(p)
    np.testing.assert_allclose(generator, combined_generator_closed_form(p), atol=1e-12)
    assert generator[0, 2] == pytest.approx(1 / (1 - 2 * p))
    assert generator[0, 3] == 0
    np.testing.assert_allclose(generator.sum(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(generator.sum(axis=1), 0, atol=1e-12)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.7, 0.9])
def test_combined_generator_from_log(p):
    np.testing.assert_allclose(combined_generator_from_log(p), combined_generator(p), atol=1e-9)


@pytest.mark.parametrize("p", [0.2, 0.3, 0.8])
def test_combined_generator_drives_distribution(p):
    step = (
        boundary_distribution(p + STEP, Branch.MINUS).array()
        - boundary_distribution(p - STEP, Branch.MINUS).array()
    ) / (2 * STEP)
    drift = combined_generator(p) @ boundary_distribution(p, Branch.MINUS).array()
    np.testing.assert_allclose(drift, step, atol=1e-6)


def test_stochastic_directions():
    first, second = marginal_generators(0.25)
    assert is_stochastic(expm(first.matrix))
    assert not is_stochastic(expm(second.matrix))
    assert is_backward_stochastic(expm(second.matrix))

    first, second = marginal_generators(0.75)
    assert is_backward_stochastic(expm(first.matrix))
    assert is_stochastic(expm(second.matrix))


@pytest.mark.parametrize("p", [0.5, 0.5 + 1e-7])
def test_generators_reject_singular_point(p):
    with pytest.raises(SingularParameter):
        marginal_generators(p)
    with pytest.raises(SingularParameter):
        jump_operators(p)


@pytest.mark.parametrize("p", [0, 1, 1.5])
def test_generators_reject_out_of_range(p):
    with pytest.raises(OutOfRange):
        combined_generator(p)


def test_jump_operators():
    first, second = jump_operators(0.25)
    np.testing.assert_allclose(first.matrix, np.diag([2 * np.sqrt(2), 0]), atol=1e-12)
    assert (first.rate, second.rate) == (1, -1)
    first, second = jump_operators(0.75)
    assert (first.rate, second.rate) == (-1, 1)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.45, 0.55, 0.8])
@pytest.mark.parametrize("branch", list(Branch))
def test_lindblad_rhs_follows_border(p, branch):
    derivative = (
        boundary_state(p + STEP, branch).entries - boundary_state(p - STEP, branch).entries
    ) / (2 * STEP)
    rhs = lindblad_rhs(p, boundary_state(p, branch))
    np.testing.assert_allclose(rhs, derivative, atol=1e-5)


def test_chip_entropy():
    assert chip_entropy(0.5) == pytest.approx(1, abs=1e-9)
    for p in (0.1, 0.27, 0.4):
        assert chip_entropy(p) == pytest.approx(chip_entropy(1 - p), abs=1e-12)
        assert 1 <= chip_entropy(p) <= 1.35227
    with pytest.raises(OutOfRange):
        chip_entropy(0)


def test_max_chip_entropy():
    p, bits = max_chip_entropy()
    assert bits == pytest.approx(1.35226, abs=1e-4)
    assert 0 < p < 0.5
    assert chip_entropy(p) == pytest.approx(bits)


def test_evolve_degenerate_range():
    trajectory = evolve_boundary(0.3, 0.3)
    assert len(trajectory.samples) == 1
    np.testing.assert_allclose(
        trajectory.samples[0].rho.entries, boundary_state(0.3, Branch.MINUS).entries
    )


@pytest.mark.parametrize("branch", list(Branch))
def test_evolve_tracks_border(branch):
    trajectory = evolve_boundary(0.05, 0.45, branch, steps=40)
    assert len(trajectory.samples) == 41
    assert trajectory.branch == branch
    for sample in trajectory.samples:
        np.testing.assert_allclose(sample.bloch().array(), wootters_border(sample.p, branch), atol=1e-4)
        assert von_neumann_entropy(sample.rho) < 1e-6
        assert sample.distribution.array().sum() == pytest.approx(1, abs=1e-9)
        assert distribution_entropy(sample.distribution) == pytest.approx(
            chip_entropy(sample.p, branch), abs=1e-4
        )


def test_evolve_midpoint_sample():
    trajectory = evolve_boundary(0.1, 0.5 - 0.01, Branch.MINUS, steps=39)
    (sample,) = [s for s in trajectory.samples if abs(s.p - 0.3) < 1e-12]
    np.testing.assert_allclose(sample.bloch().array(), wootters_border(0.3, Branch.MINUS), atol=1e-4)


def test_evolve_crosses_singular_point():
    trajectory = evolve_boundary(0.3, 0.7, Branch.MINUS, steps=40)
    ps = [sample.p for sample in trajectory.samples]
    assert ps[0] == pytest.approx(0.3) and ps[-1] == pytest.approx(0.7)
    for sample in trajectory.samples:
        np.testing.assert_allclose(
            sample.bloch().array(), wootters_border(sample.p, Branch.MINUS), atol=1e-4
        )


@pytest.mark.parametrize(
    "p0, p1, error",
    [
        (0.6, 0.4, OutOfRange),
        (0.0, 0.4, OutOfRange),
        (0.2, 0.5, SingularParameter),
    ],
)
def test_evolve_rejects_bad_range(p0, p1, error):
    with pytest.raises(error):
        evolve_boundary(p0, p1)


def test_evolve_rejects_steps_below_float_resolution():
    with pytest.raises(OutOfRange):
        evolve_boundary(0.3, float(np.nextafter(0.3, 1.0)), steps=1000)


def test_trajectory_must_increase():
    sample = evolve_boundary(0.3, 0.3).samples[0]
    with pytest.raises(ValueError):
        Trajectory(samples=[sample, sample], branch=Branch.MINUS)
