import numpy as np
import pytest

from qchip.channels import (
    REPARAMETRIZATIONS,
    ChannelName,
    apply_channel,
    bloch_action,
    chip_image,
    find_witness,
    kraus_chip_image,
    make_channel,
    preserves_chip,
    table_residual,
)
from qchip.chip import ChipPoint, chip_bloch, chip_grid, surface_residual
from qchip.errors import OutOfRange
from qchip.qubit import BlochVector, bloch_to_density, density_to_bloch, purity

SQRT3 = np.sqrt(3.0)

PRESERVING = [ChannelName.BIT_FLIP, ChannelName.PHASE_FLIP, ChannelName.PHASE_DAMPING]
LEAVING = [ChannelName.BIT_PHASE_FLIP, ChannelName.DEPOLARIZING, ChannelName.AMPLITUDE_DAMPING]


@pytest.mark.parametrize("name", list(ChannelName))
@pytest.mark.parametrize("xi", [0, 0.25, 0.5, 0.75, 1])
def test_kraus_completeness(name, xi):
    assert make_channel(name, xi).completeness_error() < 1e-12


def test_bit_flip_at_zero_is_identity(physical_bloch):
    channel = make_channel(ChannelName.BIT_FLIP, 0)
    np.testing.assert_allclose(channel.kraus[0], 0)
    for r in physical_bloch[:20]:
        rho = bloch_to_density(BlochVector.from_array(r))
        np.testing.assert_allclose(apply_channel(channel, rho).entries, rho.entries, atol=1e-15)


def test_depolarizing_weights():
    xi = 0.4
    kraus = make_channel(ChannelName.DEPOLARIZING, xi).kraus
    weights = [np.real(np.trace(k.conj().T @ k)) / 2 for k in kraus]
    assert weights == pytest.approx([xi / 4] * 3 + [1 - 3 * xi / 4])


def test_full_amplitude_damping_purifies():
    channel = make_channel(ChannelName.AMPLITUDE_DAMPING, 1)
    np.testing.assert_allclose(channel.kraus[1], 0.5 * np.array([[0, 2], [0, 0]]), atol=1e-15)
    out = apply_channel(channel, bloch_to_density(BlochVector(x=0, y=0, z=0)))
    assert purity(out) == pytest.approx(1, abs=1e-12)
    np.testing.assert_allclose(density_to_bloch(out).array(), (0, 0, 1), atol=1e-12)


@pytest.mark.parametrize("name", list(ChannelName))
def test_bloch_action_matches_kraus(name, physical_bloch):
    xi = 0.3
    matrix, shift = bloch_action(name, xi)
    channel = make_channel(name, xi)
    for r in physical_bloch[:30]:
        image = density_to_bloch(apply_channel(channel, bloch_to_density(BlochVector.from_array(r))))
        np.testing.assert_allclose(image.array(), matrix @ r + shift, atol=1e-12)


def test_bit_flip_and_depolarizing_actions():
    r = np.array([0.3, -0.4, 0.5])
    xi = 0.2
    rho = bloch_to_density(BlochVector.from_array(r))
    flipped = density_to_bloch(apply_channel(make_channel(ChannelName.BIT_FLIP, xi), rho))
    np.testing.assert_allclose(flipped.array(), (0.3, -0.4 * 0.6, 0.5 * 0.6), atol=1e-12)
    shrunk = density_to_bloch(apply_channel(make_channel(ChannelName.DEPOLARIZING, xi), rho))
    np.testing.assert_allclose(shrunk.array(), 0.8 * r, atol=1e-12)


@pytest.mark.parametrize("name", list(ChannelName))
def test_chip_image_at_zero_is_the_chip(name):
    for p, q in ((1 / 3, 2 / 5), (0.5, 0.6)):
        expected = chip_bloch(ChipPoint(p=p, q=q)).array()
        np.testing.assert_allclose(kraus_chip_image(name, 0, p, q).array(), expected, atol=1e-12)
        if name not in (ChannelName.BIT_PHASE_FLIP,):
            np.testing.assert_allclose(chip_image(name, 0, p, q).array(), expected, atol=1e-12)


def test_phase_damping_collapses_chip():
    for p, q in ((0.3, 0.4), (0.6, 0.5)):
        image = chip_image(ChannelName.PHASE_DAMPING, 1, p, q)
        np.testing.assert_allclose(image.array(), (0, 0, -SQRT3 * (2 * p - 1)), atol=1e-12)


@pytest.mark.parametrize(
    "name", [ChannelName.BIT_FLIP, ChannelName.PHASE_FLIP, ChannelName.DEPOLARIZING, ChannelName.PHASE_DAMPING]
)
def test_closed_forms_match_kraus(name):
    assert table_residual(name, 1 / 3, grid=8) < 1e-12


@pytest.mark.parametrize("name", [ChannelName.BIT_PHASE_FLIP, ChannelName.AMPLITUDE_DAMPING])
def test_closed_form_disagreements_are_reported(name):
    assert table_residual(name, 1 / 3, grid=8) > 1e-3


@pytest.mark.parametrize("name", PRESERVING)
def test_preserving_channels_reparametrize(name):
    result = preserves_chip(name)
    assert result.preserved
    assert result.witness is None
    xi = 1 / 3
    for p, q in chip_grid(20):
        p2, q2 = result.reparametrize(p, q, xi)
        np.testing.assert_allclose(
            kraus_chip_image(name, xi, p, q).array(),
            chip_bloch(ChipPoint(p=p2, q=q2)).array(),
            atol=1e-12,
        )


def test_bit_flip_reparametrization():
    assert REPARAMETRIZATIONS[ChannelName.BIT_FLIP](0.2, 0.7, 0.25) == pytest.approx((0.35, 0.7))


@pytest.mark.parametrize("name", LEAVING)
def test_other_channels_leave_chip(name):
    result = preserves_chip(name, xi=1 / 3)
    assert not result.preserved
    assert result.reparametrize is None
    assert abs(result.witness.residual) > 1e-2


@pytest.mark.parametrize("name", [ChannelName.DEPOLARIZING, ChannelName.BIT_PHASE_FLIP])
def test_witness_point(name):
    image = kraus_chip_image(name, 1 / 3, 0.3, 0.7)
    assert abs(surface_residual(image)) > 1e-2
    witness = find_witness(name, 1 / 3, grid=10)
    assert abs(witness.residual) > 1e-2
    assert (witness.p, witness.q) in chip_grid(10)


@pytest.mark.parametrize("xi", [-0.1, 1.1])
def test_error_rate_range(xi):
    with pytest.raises(OutOfRange):
        make_channel(ChannelName.BIT_FLIP, xi)
    with pytest.raises(OutOfRange):
        chip_image(ChannelName.BIT_FLIP, xi, 0.5, 0.5)
