"""Network, channel, and threshold parameters shared by every other module.

The model is a homogeneous planar Poisson field of base stations with a
bounded power-law path loss g(d) = 1/(epsilon + d^alpha) and unit-mean
Rayleigh (exponential power) fading, independent across links and across
time slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FadingModel:
    """Per-link power fading law.

    Only unit-mean Rayleigh (exponential power gain) is supported; the
    moments are carried explicitly because the correlation formulas only
    ever consume E[h] and E[h^2].
    """

    kind: str = "rayleigh-unit-mean"
    first_moment: float = 1.0
    second_moment: float = 2.0

    def __post_init__(self):
        if self.kind != "rayleigh-unit-mean":
            raise ValueError(f"unsupported fading kind: {self.kind!r}")
        if self.first_moment != 1.0:
            raise ValueError("fading power gain must have unit mean")
        if self.second_moment < self.first_moment**2:
            raise ValueError("second moment below squared mean violates Jensen")


@dataclass(frozen=True)
class NetworkParams:
    """Base-station density and path-loss law.

    Parameters
    ----------
    intensity : float
        BS density (points per unit area), > 0.
    alpha : float
        Path-loss exponent, > 2 so the far field is integrable.
    epsilon : float
        Path-loss offset, >= 0.  epsilon > 0 is mandatory for interference
        moments (the plane integral of g^2 diverges at the origin otherwise);
        epsilon = 0 is the singular law used by the coverage expressions.
    """

    intensity: float
    alpha: float = 4.0
    epsilon: float = 1.0
    fading: FadingModel = field(default_factory=FadingModel)

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("intensity must be positive")
        if not self.alpha > 2:
            raise ValueError("alpha must exceed 2 for finite coverage integrals")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    def require_bounded_pathloss(self, what: str) -> None:
        """Raise unless epsilon > 0; `what` names the offending computation."""
        if self.epsilon == 0:
            raise ValueError(f"{what} requires epsilon > 0: the interference "
                             "moment integrals diverge for the singular path loss")


@dataclass(frozen=True)
class SirThreshold:
    """SIR target, stored in linear units (external surfaces speak dB)."""

    linear: float

    def __post_init__(self):
        if not self.linear > 0:
            raise ValueError("linear SIR threshold must be positive")

    @classmethod
    def from_db(cls, db: float) -> "SirThreshold":
        return cls(linear=10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * np.log10(self.linear)


def path_loss(distance, params: NetworkParams):
    """Bounded path loss g(d) = 1/(epsilon + d^alpha).

    Accepts scalars or numpy arrays.  Strictly decreasing in distance, with
    range (0, 1/epsilon] when epsilon > 0.

    Raises on d = 0 under the singular (epsilon = 0) law.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    if params.epsilon == 0 and np.any(d == 0):
        raise ValueError("singular path loss (epsilon=0) is undefined at d=0")
    out = 1.0 / (params.epsilon + d**params.alpha)
    return float(out) if np.isscalar(distance) else out


def fading_power_sample(rng: np.random.Generator, size=None):
    """Unit-mean exponential power gain draw(s) for one link and slot."""
    return rng.standard_exponential(size=size)
