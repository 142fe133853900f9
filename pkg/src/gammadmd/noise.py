"""Seeded stochastic inputs: unit-mean gamma factors and pink noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSpec:
    """Declarative description of a noise source.

    ``kind`` is ``"gamma"`` (multiplicative, unit mean, variance ``sigma2``)
    or ``"pink"`` (1/f forcing with RMS ``intensity`` relative to a reference
    amplitude).  Identical specs always reproduce identical streams.
    """

    kind: str
    sigma2: float | None = None
    intensity: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gamma", "pink"):
            raise ValueError("kind must be 'gamma' or 'pink'")
        if self.kind == "gamma":
            if self.sigma2 is None or self.sigma2 <= 0:
                raise ValueError("gamma noise needs sigma2 > 0")
        else:
            if self.intensity is None or self.intensity <= 0:
                raise ValueError("pink noise needs intensity > 0")


def sample_gamma_unit_mean(sigma2: float, count, seed: int) -> np.ndarray:
    """Draw i.i.d. gamma factors with mean 1 and variance ``sigma2``.

    Shape parameter ``1/sigma2`` and scale ``sigma2``; all draws are strictly
    positive.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    rng = np.random.default_rng(seed)
    return rng.gamma(shape=1.0 / sigma2, scale=sigma2, size=count)


def apply_multiplicative(x: np.ndarray, sigma2: float, seed: int) -> np.ndarray:
    """Multiply every entry of ``x`` by an independent unit-mean gamma factor.

    Zero entries stay zero and signs are preserved, so the output lies in
    the sign cone of the input.
    """
    x = np.asarray(x, dtype=float)
    eps = sample_gamma_unit_mean(sigma2, x.shape, seed)
    return x * eps


def pink_noise(
    length: int,
    dt: float,
    intensity_target: float,
    reference_rms: float,
    seed: int,
) -> np.ndarray:
    """Seeded 1/f-noise sequence with a prescribed RMS ratio.

    White Gaussian noise is shaped in the frequency domain with amplitude
    proportional to ``f**-0.5`` (DC removed), then rescaled so that
    ``rms(output) / reference_rms == intensity_target`` exactly.
    """
    if length < 2:
        raise ValueError("length must be at least 2")
    if intensity_target < 0:
        raise ValueError("intensity_target must be nonnegative")
    if intensity_target == 0.0:
        return np.zeros(length)
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(length)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(length, d=dt)
    shape = np.zeros_like(freqs)
    shape[1:] = freqs[1:] ** -0.5
    out = np.fft.irfft(spectrum * shape, n=length)
    rms = float(np.sqrt(np.mean(out**2)))
    return out * (intensity_target * reference_rms / rms)
