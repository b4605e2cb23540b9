import numpy as np


def derive_seed(master_seed: int, index: int) -> int:
	"""Derive an independent 64-bit seed for trial `index`.

	Counter-based: the result depends only on (master_seed, index), so trials
	can run in any order or in parallel and still reproduce.
	"""
	sequence = np.random.SeedSequence([master_seed & 0xFFFFFFFFFFFFFFFF, index])
	return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int | None) -> np.random.Generator:
	return np.random.default_rng(seed)
