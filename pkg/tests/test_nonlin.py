"""Quadratic correction terms: manufactured values and homogeneity order."""

from __future__ import annotations

import numpy as np
import pytest

from plate_fsi.timedomain.grid import Grid, State, tangential_derivative
from plate_fsi.timedomain.nonlin import (
    nonlinear_divergence,
    nonlinear_momentum,
    nonlinear_plate_load,
)


@pytest.fixture(scope="module")
def grid() -> Grid:
    return Grid(n=2, N=32, M=48, T=0.5, dt=0.25)


def _random_state(grid: Grid, rng) -> State:
    # Band-limited tangential content, smooth decaying vertical profiles.
    (x,) = grid.tangential_coordinates()
    base = 2.0 * np.pi / grid.L
    prof = np.exp(-grid.mesh.nodes)
    state = State.zeros(grid)
    for comp in range(grid.n):
        wave = sum(
            rng.normal() * np.sin((k + 1) * base * x + rng.uniform(0, np.pi))
            for k in range(3)
        )
        state.v[comp] = wave[..., np.newaxis] * prof
    state.p = rng.normal() * np.cos(base * x)[..., np.newaxis] * prof
    state.eta = 0.3 * np.sin(base * x) + 0.1 * np.cos(2 * base * x)
    state.eta_t = 0.2 * np.cos(base * x)
    return state


class TestManufacturedValues:
    def test_divergence_correction_closed_form(self, grid: Grid) -> None:
        # eta = sin(k x), v_tangential = x_n: the correction is
        # grad' eta * d_n v' = k cos(k x), uniformly in x_n.
        (x,) = grid.tangential_coordinates()
        k = 2.0 * np.pi / grid.L
        state = State.zeros(grid)
        state.eta = np.sin(k * x)
        state.v[0] = np.broadcast_to(grid.mesh.nodes, state.v[0].shape).copy()
        out = nonlinear_divergence(state, grid)
        expected = (k * np.cos(k * x))[..., np.newaxis]
        np.testing.assert_allclose(out, np.broadcast_to(expected, out.shape), atol=1e-12)

    def test_plate_load_closed_form(self, grid: Grid) -> None:
        # Same state: the shear part contributes -k cos(k x) * d_n v'(0)
        # = -k cos(k x); the normal trace vanishes, so no tilt part.
        (x,) = grid.tangential_coordinates()
        k = 2.0 * np.pi / grid.L
        state = State.zeros(grid)
        state.eta = np.sin(k * x)
        state.v[0] = np.broadcast_to(grid.mesh.nodes, state.v[0].shape).copy()
        out = nonlinear_plate_load(state, grid)
        np.testing.assert_allclose(out, -k * np.cos(k * x), atol=1e-12)

    def test_flat_interface_reduces_to_convection(self, grid: Grid, rng) -> None:
        state = _random_state(grid, rng)
        state.eta = np.zeros(grid.tan_shape)
        state.eta_t = np.zeros(grid.tan_shape)
        out = nonlinear_momentum(state, grid)
        dn_v = np.stack(
            [
                grid.mesh.diff_matrix(1, 4) @ state.v[c].reshape(-1, grid.M + 1).T
                for c in range(grid.n)
            ]
        ).transpose(0, 2, 1).reshape(state.v.shape)
        expected = -state.v[0][np.newaxis] * tangential_derivative(
            state.v, grid
        ) - state.v[1][np.newaxis] * dn_v
        np.testing.assert_allclose(out, expected, atol=1e-12 * np.abs(expected).max())
        np.testing.assert_allclose(nonlinear_divergence(state, grid), 0.0, atol=1e-15)
        np.testing.assert_allclose(nonlinear_plate_load(state, grid), 0.0, atol=1e-15)

    def test_zero_state_maps_to_zero(self, grid: Grid) -> None:
        state = State.zeros(grid)
        assert not nonlinear_momentum(state, grid).any()
        assert not nonlinear_divergence(state, grid).any()
        assert not nonlinear_plate_load(state, grid).any()


class TestQuadraticHomogeneity:
    def _norm(self, state: State, grid: Grid) -> float:
        return float(
            np.abs(nonlinear_momentum(state, grid)).max()
            + np.abs(nonlinear_divergence(state, grid)).max()
            + np.abs(nonlinear_plate_load(state, grid)).max()
        )

    def _scaled(self, state: State, s: float) -> State:
        return State(
            v=s * state.v, p=s * state.p, eta=s * state.eta, eta_t=s * state.eta_t
        )

    def test_log_log_slope_is_two(self, grid: Grid, rng) -> None:
        state = _random_state(grid, rng)
        scales = np.array([1.0, 0.5, 0.25, 0.125])
        norms = np.array([self._norm(self._scaled(state, s), grid) for s in scales])
        slopes = np.diff(np.log(norms)) / np.diff(np.log(scales))
        assert (slopes >= 1.9).all()
        assert (slopes <= 2.1).all()

    def test_pure_quadratic_terms_scale_exactly(self, grid: Grid, rng) -> None:
        state = _random_state(grid, rng)
        half = self._scaled(state, 0.5)
        np.testing.assert_allclose(
            nonlinear_divergence(half, grid),
            0.25 * nonlinear_divergence(state, grid),
            atol=1e-14,
        )
        np.testing.assert_allclose(
            nonlinear_plate_load(half, grid),
            0.25 * nonlinear_plate_load(state, grid),
            atol=1e-14,
        )
