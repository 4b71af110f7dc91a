"""
Counter-Based Random Streams

Every protocol round draws from its own stream keyed by (master_seed, stream_id),
so rounds can execute in any order or in parallel and still reproduce the same
draws. Streams are backed by numpy's Philox counter-based bit generator.
"""

from typing import List, Optional, Sequence

import numpy as np

from quantum.states import DegenerateBranch


MASK_64 = (1 << 64) - 1
BRANCH_EPSILON = 1e-15

# uniforms pulled from the bit generator per refill
UNIFORM_BLOCK = 8
DOUBLE_SCALE = 1.0 / 9007199254740992.0

# Stream reserved for the public-discussion (sifting) draws.
SIFT_STREAM_ID = MASK_64


class ScriptExhausted(Exception):
    """Raised when a scripted stream is asked for an outcome beyond its script"""

    def __init__(self, probabilities: Sequence[float], label: str = ""):
        self.probabilities = tuple(float(p) for p in probabilities)
        self.label = label
        super().__init__(f"no scripted outcome for draw '{label}'")


class RngStream:
    """
    Deterministic stream of draws for one (master_seed, stream_id) pair.

    ``counter`` counts the draws taken so far.
    """

    def __init__(self, master_seed: int, stream_id: int):
        self.master_seed = int(master_seed) & MASK_64
        self.stream_id = int(stream_id) & MASK_64
        self.counter = 0
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        self._bit_generator = np.random.Philox(key=key)
        self._generator: Optional[np.random.Generator] = None
        self._block: List[float] = []

    def uniform(self) -> float:
        self.counter += 1
        if not self._block:
            # same doubles as Generator.random(): top 53 bits of each word
            raw = self._bit_generator.random_raw(UNIFORM_BLOCK) >> np.uint64(11)
            self._block = (raw * DOUBLE_SCALE).tolist()[::-1]
        return self._block.pop()

    def choose(self, probabilities: Sequence[float], label: str = "") -> int:
        """Draw an outcome index with the given probabilities"""
        u = self.uniform()
        cumulative = 0.0
        last_possible = 0
        for index, p in enumerate(probabilities):
            if p <= BRANCH_EPSILON:
                continue
            last_possible = index
            cumulative += p
            if u < cumulative:
                return index
        # rounding left u beyond the final cumulative sum
        return last_possible

    def bernoulli(self, p: float, label: str = "") -> bool:
        return self.choose((p, 1.0 - p), label) == 0

    def sample_indices(self, population: int, k: int) -> List[int]:
        """Uniformly choose ``k`` distinct indices of ``range(population)``, sorted"""
        if k <= 0 or population <= 0:
            return []
        self.counter += 1
        if self._generator is None:
            self._generator = np.random.Generator(self._bit_generator)
        chosen = self._generator.choice(population, size=k, replace=False)
        return sorted(int(i) for i in chosen)


class ScriptedRngStream(RngStream):
    """
    Outcome source that replays a fixed outcome script.

    Used to force protocol branches. Each choice also accumulates the Born
    weight of the scripted outcome in ``path_probability``.
    """

    def __init__(self, outcomes: Sequence[int], fallback: Optional[RngStream] = None):
        self.master_seed = 0
        self.stream_id = 0
        self.counter = 0
        self.outcomes = list(outcomes)
        self.fallback = fallback
        self.path_probability = 1.0
        self.labels: List[str] = []

    def uniform(self) -> float:
        if self.fallback is None:
            raise ScriptExhausted((), "uniform")
        self.counter += 1
        return self.fallback.uniform()

    def choose(self, probabilities: Sequence[float], label: str = "") -> int:
        if self.counter >= len(self.outcomes):
            if self.fallback is None:
                raise ScriptExhausted(probabilities, label)
            outcome = self.fallback.choose(probabilities, label)
        else:
            outcome = self.outcomes[self.counter]
            if probabilities[outcome] <= BRANCH_EPSILON:
                raise DegenerateBranch(
                    f"scripted outcome {outcome} of '{label}' has probability {probabilities[outcome]!r}"
                )
        self.counter += 1
        self.path_probability *= float(probabilities[outcome])
        self.labels.append(label)
        return outcome

    def sample_indices(self, population: int, k: int) -> List[int]:
        if self.fallback is None:
            raise ScriptExhausted((), "sample_indices")
        return self.fallback.sample_indices(population, k)
