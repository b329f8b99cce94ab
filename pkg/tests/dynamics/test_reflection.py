import numpy as np
import pytest

from dynamics.reflection import (
    ReflectionMode,
    floor_normal,
    lambertian_direction,
    reflect_wall,
    resolve_particle_ball,
    sidewall_normal,
    specular,
)
from errors import EventOrderError, ModeMismatchError


def test_mode_parsing():
    assert ReflectionMode.parse(" Specular ") is ReflectionMode.SPECULAR
    assert ReflectionMode.parse(ReflectionMode.LAMBERTIAN) is ReflectionMode.LAMBERTIAN
    with pytest.raises(ModeMismatchError):
        ReflectionMode.parse("diffuse")


def test_normals():
    np.testing.assert_array_equal(floor_normal(3), [0.0, 0.0, 1.0])
    np.testing.assert_allclose(sidewall_normal(np.array([0.6, 0.8])), [-0.6, -0.8, 0.0])
    np.testing.assert_allclose(sidewall_normal(np.array([-1.0])), [1.0, 0.0])


def test_specular_flips_the_normal_component():
    out = specular(np.array([0.3, -2.0]), floor_normal(2))
    np.testing.assert_allclose(out, [0.3, 2.0])


def test_equal_masses_swap_normal_components():
    v, V = resolve_particle_ball(np.array([0.0, -1.0]), np.zeros(2), np.array([0.0, 1.0]), 1.0, 1.0)
    np.testing.assert_allclose(v, [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(V, [0.0, -1.0])


def test_particle_ball_exchange_conserves_momentum_and_energy(rng):
    for _ in range(50):
        normal = rng.standard_normal(3)
        normal /= np.linalg.norm(normal)
        v = rng.standard_normal(3) - 3.0 * normal
        V = rng.standard_normal(3) * 0.1
        if np.dot(v - V, normal) >= 0.0:
            continue
        m, M = 0.05, 0.7
        v_new, V_new = resolve_particle_ball(v, V, normal, m, M)
        np.testing.assert_allclose(m * v + M * V, m * v_new + M * V_new, atol=1e-13)
        before = m * np.dot(v, v) + M * np.dot(V, V)
        after = m * np.dot(v_new, v_new) + M * np.dot(V_new, V_new)
        assert after == pytest.approx(before, rel=1e-13)
        assert np.dot(v_new - V_new, normal) > 0.0


def test_separating_contact_is_rejected():
    with pytest.raises(EventOrderError):
        resolve_particle_ball(np.array([0.0, 1.0]), np.zeros(2), np.array([0.0, 1.0]), 1.0, 1.0)


def test_lambertian_keeps_speed_and_points_inward(rng):
    normal = sidewall_normal(np.array([0.0, 1.0]))
    velocity = np.array([0.2, 1.5, -0.4])
    for _ in range(200):
        out = reflect_wall(velocity, normal, ReflectionMode.LAMBERTIAN, rng)
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(velocity))
        assert np.dot(out, normal) >= 0.0


@pytest.mark.parametrize("d, expected", [(2, np.pi / 4.0), (3, 2.0 / 3.0)])
def test_lambertian_cosine_law(d, expected, rng):
    normal = floor_normal(d)
    cosines = np.array([lambertian_direction(normal, rng)[-1] for _ in range(20000)])
    assert cosines.mean() == pytest.approx(expected, abs=0.01)


def test_lambertian_2d_tangent_sign_is_symmetric(rng):
    normal = floor_normal(2)
    tangents = np.array([lambertian_direction(normal, rng)[0] for _ in range(20000)])
    assert abs(tangents.mean()) < 0.02


def test_ball_never_reflects_diffusely(rng):
    with pytest.raises(ModeMismatchError):
        reflect_wall(np.array([0.0, -1.0]), floor_normal(2), ReflectionMode.LAMBERTIAN, rng, is_ball=True)
    with pytest.raises(ModeMismatchError):
        reflect_wall(np.array([0.0, -1.0]), floor_normal(2), "lambertian")
    out = reflect_wall(np.array([0.0, -1.0]), floor_normal(2), "specular", is_ball=True)
    np.testing.assert_allclose(out, [0.0, 1.0])
