import numpy as np

SEED_MASK = (1 << 64) - 1


class Rng:
    """Seedable random stream owned by a single caller.

    Uniform variates come from a PCG64 bit generator; Gaussian variates are
    produced from pairs of uniforms by the Box-Muller transform, so the
    whole stream is fixed by the 64-bit seed alone. Workers running in
    parallel use ``spawn(i)``, which seeds ``seed + i``.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & SEED_MASK
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self):
        return f"Rng(seed={self.seed})"

    def spawn(self, index: int) -> "Rng":
        return Rng(self.seed + index)

    def uniform(self, size) -> np.ndarray:
        return self._generator.random(size)

    def integers(self, high: int, size) -> np.ndarray:
        return self._generator.integers(0, high, size=size)

    def bits(self, count: int) -> np.ndarray:
        return self.integers(2, count).astype(np.uint8)

    def choice(self, values, size: int) -> np.ndarray:
        values = np.asarray(values)
        return values[self.integers(len(values), size)]

    def complex_normal(self, shape, variance: float = 1.0) -> np.ndarray:
        """Circularly symmetric CN(0, variance) samples.

        Box-Muller yields the polar form directly: a Rayleigh radius and a
        uniform phase, each quadrature ending up N(0, variance / 2).
        """
        count = int(np.prod(shape))
        u_radius = self.uniform(count)
        u_phase = self.uniform(count)
        radius = np.sqrt(-variance * np.log1p(-u_radius))
        return (radius * np.exp(2j * np.pi * u_phase)).reshape(shape)
