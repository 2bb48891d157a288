"""Seeded random states with order-independent per-trial streams.

Stream algorithm (fixed, so other implementations can reproduce it):

* ``mix64`` is the splitmix64 finaliser::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      z =  z ^ (z >> 31)                       (all mod 2**64)

* the stream for ``(seed, trial)`` has key ``mix64(seed ^ mix64(trial))``;
  its ``j``-th raw word (``j = 0, 1, ...``) is
  ``mix64(key + (j + 1) * 0x9E3779B97F4A7C15)``.
* a uniform is ``(word >> 11) * 2**-53`` in [0, 1).
* Gaussian pair ``k`` uses words ``2k`` and ``2k + 1`` through Box-Muller:
  ``r = sqrt(-2 ln(1 - U0))``, ``(r cos 2 pi U1, r sin 2 pi U1)``.

State layouts per trial:

* ``hs``: ``N^2`` pairs fill ``G`` row-major (real, imaginary);
  ``rho = G G^H / Tr(G G^H)``.
* ``haar-pure``: ``N`` pairs give ``psi``; ``rho = psi psi^H / |psi|^2``.
* ``bloch-uniform`` (qubits only): pairs 0 and 1 give a direction from their
  first three values, word 4 gives the radius ``U^(1/3)``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidSpec
from .linalg import dot_sigma
from .states import DensityMatrix, validate_density

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_POW_M53 = 2.0**-53


class Measure(str, enum.Enum):
    HILBERT_SCHMIDT = "hs"
    HAAR_PURE = "haar-pure"
    BLOCH_UNIFORM = "bloch-uniform"


@dataclass(frozen=True)
class SamplerSpec:
    measure: Measure = Measure.HILBERT_SCHMIDT
    dim: int = 2
    seed: int = 42

    def __post_init__(self):
        try:
            object.__setattr__(self, "measure", Measure(self.measure))
        except ValueError:
            raise InvalidSpec(f"unknown measure {self.measure!r}") from None
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidSpec(f"dim must be an integer >= 2, got {self.dim!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        if self.measure is Measure.BLOCH_UNIFORM and self.dim != 2:
            raise InvalidSpec("bloch-uniform sampling is only defined for dim 2")


def mix64(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, trials) -> np.ndarray:
    trials = np.atleast_1d(np.asarray(trials, dtype=np.uint64))
    return mix64(np.uint64(seed) ^ mix64(trials))


def raw_words(seed: int, trials, count: int, start: int = 0) -> np.ndarray:
    """Words ``start .. start+count-1`` of each trial's stream, shape ``(T, count)``."""
    keys = stream_keys(seed, trials)
    with np.errstate(over="ignore"):
        steps = (np.arange(start, start + count, dtype=np.uint64) + np.uint64(1)) * GOLDEN
        return mix64(keys[:, None] + steps[None, :])


def uniforms(seed: int, trials, count: int, start: int = 0) -> np.ndarray:
    return (raw_words(seed, trials, count, start) >> np.uint64(11)).astype(float) * _TWO_POW_M53


def gaussians(seed: int, trials, npairs: int) -> np.ndarray:
    """Flattened Box-Muller pairs ``[x0, y0, x1, y1, ...]``, shape ``(T, 2 npairs)``."""
    u = uniforms(seed, trials, 2 * npairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0::2]))
    angle = 2.0 * np.pi * u[:, 1::2]
    out = np.empty_like(u)
    out[:, 0::2] = radius * np.cos(angle)
    out[:, 1::2] = radius * np.sin(angle)
    return out


class CounterStream:
    """Sequential view of one ``(seed, trial)`` stream."""

    def __init__(self, seed: int, trial_index: int = 0):
        self.seed = int(seed)
        self.trial_index = int(trial_index)
        self.position = 0

    def next_word(self) -> int:
        word = raw_words(self.seed, self.trial_index, 1, self.position)[0, 0]
        self.position += 1
        return int(word)

    def uniform(self) -> float:
        return (self.next_word() >> 11) * _TWO_POW_M53

    def gaussian_pair(self) -> tuple[float, float]:
        u0, u1 = self.uniform(), self.uniform()
        r = np.sqrt(-2.0 * np.log1p(-u0))
        return float(r * np.cos(2.0 * np.pi * u1)), float(r * np.sin(2.0 * np.pi * u1))


def gaussian_pair(stream: CounterStream) -> tuple[float, float]:
    return stream.gaussian_pair()


def _hs(seed, trials, n):
    g = gaussians(seed, trials, n * n)
    g = (g[:, 0::2] + 1j * g[:, 1::2]).reshape(-1, n, n)
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def _haar(seed, trials, n):
    g = gaussians(seed, trials, n)
    psi = g[:, 0::2] + 1j * g[:, 1::2]
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    return psi[:, :, None] * np.conj(psi[:, None, :])


def bloch_ball_points(seed, trials) -> np.ndarray:
    g = gaussians(seed, trials, 2)[:, :3]
    norm = np.linalg.norm(g, axis=1, keepdims=True)
    direction = np.where(norm > 0, g / np.where(norm > 0, norm, 1.0), np.array([0.0, 0.0, 1.0]))
    radius = np.cbrt(uniforms(seed, trials, 1, start=4))
    return direction * radius


def _bloch_uniform(seed, trials, n):
    return 0.5 * (np.eye(2) + dot_sigma(bloch_ball_points(seed, trials)))


_SAMPLERS = {
    Measure.HILBERT_SCHMIDT: _hs,
    Measure.HAAR_PURE: _haar,
    Measure.BLOCH_UNIFORM: _bloch_uniform,
}


def sample_states(spec: SamplerSpec, trials) -> np.ndarray:
    """Validated stack of states for the given trial indices, shape ``(T, N, N)``."""
    trials = np.atleast_1d(np.asarray(trials))
    if trials.size and (trials.min() < 0):
        raise InvalidSpec("trial indices must be non-negative")
    if trials.size == 0:
        return np.empty((0, spec.dim, spec.dim), dtype=complex)
    rho = _SAMPLERS[spec.measure](spec.seed, trials.astype(np.uint64), spec.dim)
    return validate_density(rho)


def sample_state(spec: SamplerSpec, trial_index: int) -> DensityMatrix:
    return DensityMatrix(sample_states(spec, [trial_index])[0])


REFERENCE_PATH = Path(__file__).parent / "data" / "reference_draws.json"
REFERENCE_SEED = 42
REFERENCE_COUNT = 5
REFERENCE_CASES = [(Measure.HILBERT_SCHMIDT, d) for d in (2, 3, 4)] + [
    (Measure.HAAR_PURE, d) for d in (2, 3, 4)
] + [(Measure.BLOCH_UNIFORM, 2)]


def reference_document() -> dict:
    """First draws per (measure, dim) at seed 42, for cross-implementation checks."""
    stream = CounterStream(REFERENCE_SEED, 0)
    doc = {
        "seed": REFERENCE_SEED,
        "raw_words_trial0": [format(int(w), "#018x") for w in raw_words(REFERENCE_SEED, 0, 8)[0]],
        "gaussian_pairs_trial0": [list(stream.gaussian_pair()) for _ in range(REFERENCE_COUNT)],
        "states": [],
    }
    for measure, dim in REFERENCE_CASES:
        rho = sample_states(SamplerSpec(measure, dim, REFERENCE_SEED), np.arange(REFERENCE_COUNT))
        doc["states"].append(
            {
                "measure": measure.value,
                "dim": dim,
                "trials": list(range(REFERENCE_COUNT)),
                "matrices": np.stack([rho.real, rho.imag], axis=-1).tolist(),
            }
        )
    return doc


def load_reference_draws() -> dict:
    return json.loads(REFERENCE_PATH.read_text())
