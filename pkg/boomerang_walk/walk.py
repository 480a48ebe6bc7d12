"""Core of the discrete-time quantum walk

This module defines the state of the walker on a finite chain and the three
operators of one time step: the phase gain ``D``, the coin ``C(theta)`` and
the conditional shift ``S``. One step applies ``D`` first, then ``C`` and
finally ``S``.

The public operators are pure functions on :class:`WalkState` values. The
:class:`Walker` class performs the same evolution in place and restricted to
the light cone of the walker, which is what the ensemble runner uses."""

# SPDX-FileCopyrightText: 2024 boomerang-walk developers
#
# SPDX-License-Identifier: LGPL-3.0-only

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from boomerang_walk.common import (
    BoundaryOverflowError,
    ConfigurationError,
    DimensionError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoinAngle:
    """The angle of the SU(2) coin

    ``theta = 0`` is the Pauli-Z coin, ``pi / 4`` the Hadamard coin and
    ``pi / 2`` the Pauli-X coin."""

    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if not 0 <= theta <= np.pi / 2:
            raise ConfigurationError(
                "The coin angle must lie in [0, pi/2], got %r" % theta,
                key="theta",
            )
        object.__setattr__(self, "theta", theta)

    @property
    def matrix(self) -> NDArray[np.float64]:
        """The 2x2 coin matrix acting on ``(a, b)``"""
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[c, s], [s, -c]])


@dataclass(frozen=True)
class InitialStateAngles:
    """Bloch angles of the initial coin state

    The initial state is ``cos(alpha/2)|R> + exp(i beta) sin(alpha/2)|L>``
    at the origin."""

    alpha: float
    beta: float

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        if not 0 <= alpha <= np.pi:
            raise ConfigurationError(
                "alpha must lie in [0, pi], got %r" % alpha, key="alpha"
            )
        if not 0 <= beta < 2 * np.pi:
            raise ConfigurationError(
                "beta must lie in [0, 2 pi), got %r" % beta, key="beta"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def right(cls):
        """The pure ``|R>`` state, initial condition (i)"""
        return cls(0.0, 0.0)

    @classmethod
    def left(cls):
        """The pure ``|L>`` state, initial condition (ii)"""
        return cls(np.pi, 0.0)

    @classmethod
    def symmetric(cls):
        """``(|R> + i|L>) / sqrt(2)``, initial condition (iii)"""
        return cls(np.pi / 2, np.pi / 2)

    @property
    def amplitudes(self) -> tuple[complex, complex]:
        """The coin amplitudes ``(a, b)`` at the starting site"""
        half = self.alpha / 2
        phase = complex(np.cos(self.beta), np.sin(self.beta))
        return complex(np.cos(half)), phase * np.sin(half)


@dataclass(frozen=True)
class WalkState:
    """The walker on a finite chain at one instant

    Parameters
    ----------
    amp_r: np.ndarray
        Complex amplitudes of the ``|R>`` coin state per site
    amp_l: np.ndarray
        Complex amplitudes of the ``|L>`` coin state per site
    origin_index: int
        The array index of the starting site
    time: int
        Number of steps applied so far"""

    amp_r: NDArray[np.complex128]
    amp_l: NDArray[np.complex128]
    origin_index: int
    time: int = 0

    def __post_init__(self):
        if len(self.amp_r) != len(self.amp_l):
            raise DimensionError(
                "amp_r and amp_l differ in length (%i != %i)"
                % (len(self.amp_r), len(self.amp_l))
            )

    @property
    def n_sites(self) -> int:
        """The number of lattice sites"""
        return len(self.amp_r)

    def norm(self) -> float:
        """The total probability of the state"""
        return float(
            np.sum(_abs2(self.amp_r)) + np.sum(_abs2(self.amp_l))
        )


def _abs2(z):
    return z.real**2 + z.imag**2


def lattice_size(horizon: int) -> int:
    """Number of sites needed for `horizon` steps without edge effects"""
    return 2 * horizon + 3


def lattice_origin(horizon: int) -> int:
    """Index of the starting site on a lattice for `horizon` steps"""
    return horizon + 1


def phase_factors(nu: NDArray[np.float64]) -> NDArray[np.complex128]:
    """The factors ``exp(2 pi i nu)`` of the phase-gain operator"""
    arg = 2 * np.pi * np.asarray(nu, dtype=float)
    return np.cos(arg) + 1j * np.sin(arg)


def initial_state(
    angles: InitialStateAngles, n_sites: int, origin_index: int
) -> WalkState:
    """Prepare the walker at `origin_index`

    Parameters
    ----------
    angles: InitialStateAngles
        The Bloch angles of the coin state
    n_sites: int
        The length of the chain
    origin_index: int
        The index of the starting site

    Returns
    -------
    WalkState
        The state at ``time = 0``

    Raises
    ------
    ConfigurationError
        If the chain is empty or the origin lies outside of it"""
    if n_sites < 1:
        raise ConfigurationError(
            "The lattice needs at least one site, got %r" % n_sites,
            key="n_sites",
        )
    if not 0 <= origin_index < n_sites:
        raise ConfigurationError(
            "origin_index %r is outside the lattice of %i sites"
            % (origin_index, n_sites),
            key="origin_index",
        )
    amp_r = np.zeros(n_sites, dtype=complex)
    amp_l = np.zeros(n_sites, dtype=complex)
    amp_r[origin_index], amp_l[origin_index] = angles.amplitudes
    return WalkState(amp_r, amp_l, origin_index)


def apply_phase(state: WalkState, field) -> WalkState:
    """Apply the phase-gain operator

    Both coin components at site ``n`` are multiplied by
    ``exp(2 pi i nu_n)``.

    Parameters
    ----------
    state: WalkState
        The current state
    field: boomerang_walk.disorder.DisorderField
        The phases ``nu`` of the disorder realization

    Raises
    ------
    DimensionError
        If the field does not match the lattice"""
    nu = np.asarray(field.nu)
    if len(nu) != state.n_sites:
        raise DimensionError(
            "Disorder field has %i sites but the lattice has %i"
            % (len(nu), state.n_sites)
        )
    phases = phase_factors(nu)
    return dataclasses.replace(
        state, amp_r=state.amp_r * phases, amp_l=state.amp_l * phases
    )


def apply_coin(state: WalkState, coin: CoinAngle) -> WalkState:
    """Apply the coin ``C(theta)`` on every site"""
    c, s = np.cos(coin.theta), np.sin(coin.theta)
    a, b = state.amp_r, state.amp_l
    return dataclasses.replace(state, amp_r=a * c + b * s, amp_l=a * s - b * c)


def apply_shift(state: WalkState) -> WalkState:
    """Move right-movers one site to the right and left-movers to the left

    Raises
    ------
    BoundaryOverflowError
        If any amplitude sits on the first or the last site"""
    a, b = state.amp_r, state.amp_l
    if a[0] or a[-1] or b[0] or b[-1]:
        raise BoundaryOverflowError(
            "Nonzero amplitude at the lattice boundary at t=%i" % state.time
        )
    amp_r = np.zeros_like(a)
    amp_l = np.zeros_like(b)
    amp_r[1:] = a[:-1]
    amp_l[:-1] = b[1:]
    return dataclasses.replace(state, amp_r=amp_r, amp_l=amp_l)


def step(state: WalkState, field, coin: CoinAngle) -> WalkState:
    """Perform one time step ``S C D``

    Parameters
    ----------
    state: WalkState
        The current state
    field: boomerang_walk.disorder.DisorderField
        The phases of this step
    coin: CoinAngle
        The coin

    Returns
    -------
    WalkState
        The new state with its time incremented by one"""
    new = apply_shift(apply_coin(apply_phase(state, field), coin))
    return dataclasses.replace(new, time=state.time + 1)


def probabilities(
    state: WalkState,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """The site probabilities ``(P, P_R, P_L)`` of `state`

    ``P_R`` and ``P_L`` are the unnormalized coin components, ``P`` their
    sum."""
    p_r = _abs2(state.amp_r)
    p_l = _abs2(state.amp_l)
    return p_r + p_l, p_r, p_l


class Walker:
    """In-place evolution of one walk inside its light cone

    The lattice is sized with :func:`lattice_size` so the walker can never
    reach the boundary within `horizon` steps. Each step only touches the
    sites inside the light cone, which is observationally equivalent to
    :func:`step` on the full chain.

    Parameters
    ----------
    angles: InitialStateAngles
        The initial coin state
    coin: CoinAngle
        The coin
    horizon: int
        The maximum number of steps"""

    def __init__(
        self, angles: InitialStateAngles, coin: CoinAngle, horizon: int
    ):
        self.horizon = horizon
        self.n_sites = lattice_size(horizon)
        self.origin_index = lattice_origin(horizon)
        state = initial_state(angles, self.n_sites, self.origin_index)
        self.amp_r = state.amp_r
        self.amp_l = state.amp_l
        self._cos = np.cos(coin.theta)
        self._sin = np.sin(coin.theta)
        self.time = 0
        logger.debug(
            "Walker on %i sites with theta=%s", self.n_sites, coin.theta
        )

    @property
    def support(self) -> slice:
        """The sites that may carry amplitude at the current time"""
        return slice(
            self.origin_index - self.time, self.origin_index + self.time + 1
        )

    def step(self, phases: NDArray[np.complex128]):
        """Advance the walker by one step

        Parameters
        ----------
        phases: np.ndarray
            The factors ``exp(2 pi i nu)`` for every site of the lattice"""
        if self.time >= self.horizon:
            raise BoundaryOverflowError(
                "The lattice is sized for %i steps" % self.horizon
            )
        sl = self.support
        lo, hi = sl.start, sl.stop
        phase = phases[sl]
        a = self.amp_r[sl] * phase
        b = self.amp_l[sl] * phase
        c, s = self._cos, self._sin
        self.amp_r[lo + 1 : hi + 1] = a * c + b * s
        self.amp_r[lo] = 0
        self.amp_l[lo - 1 : hi - 1] = a * s - b * c
        self.amp_l[hi - 1] = 0
        self.time += 1

    def probabilities(self):
        """``(P, P_R, P_L)`` restricted to :attr:`support`"""
        sl = self.support
        p_r = _abs2(self.amp_r[sl])
        p_l = _abs2(self.amp_l[sl])
        return p_r + p_l, p_r, p_l

    @property
    def state(self) -> WalkState:
        """A copy of the current state on the full lattice"""
        return WalkState(
            self.amp_r.copy(), self.amp_l.copy(), self.origin_index, self.time
        )
