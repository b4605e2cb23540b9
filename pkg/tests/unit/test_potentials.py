import math

import numpy as np
import pytest

from sonar.core.generators import star_paths_graph, star_vertex
from sonar.core.potentials import (
	CandidateSet,
	MedianSelector,
	approx_median,
	exact_median,
	gamma,
	gamma_all,
	phi,
	phi_all,
	pruned_star_set,
	qualifying_mask,
	select_qualifying,
	star_center_potential,
	star_spoke_potential,
	tree_phi_all,
	weighted_gamma,
	weighted_gamma_all,
	weighted_gamma_median,
)
from sonar.models.search import MedianPolicy
from sonar.utilities.errors import NotATree, ScriptViolation
from sonar.utilities.types import MedianRule, Potential


class TestCandidateSet:
	def test_restrict_and_count(self):
		s = CandidateSet.full(6)
		s.restrict(np.array([True, False, True, False, True, False]))
		assert len(s) == 3
		assert s.members() == [0, 2, 4]

	def test_discard_add_only(self):
		s = CandidateSet.from_vertices(5, [1, 3])
		s.discard(1)
		s.discard(1)
		assert len(s) == 1
		assert s.only() == 3
		s.add(4)
		assert s.only() is None
		assert 4 in s and 0 not in s

	def test_copy_is_independent(self):
		s = CandidateSet.full(3)
		t = s.copy()
		t.discard(0)
		assert len(s) == 3


class TestPotentials:
	def test_phi_on_path(self, path5):
		dt = path5.distances
		s = CandidateSet.full(5)
		assert phi(dt, s, 2) == 6.0
		assert phi(dt, s, 0) == 10.0

	def test_gamma_on_path(self, path5):
		dt = path5.distances
		s = CandidateSet.full(5)
		assert gamma(path5, dt, s, 2) == 2
		assert gamma(path5, dt, s, 0) == 4

	def test_vectorised_forms_match_scalars(self, small_connected):
		dt = small_connected.distances
		s = CandidateSet.from_vertices(small_connected.n, range(0, small_connected.n, 3))
		weights = np.linspace(0.1, 1.0, small_connected.n)
		phis = phi_all(dt, s)
		gammas = gamma_all(small_connected, dt, s)
		wgammas = weighted_gamma_all(small_connected, dt, weights)
		for v in range(small_connected.n):
			assert phis[v] == pytest.approx(phi(dt, s, v))
			assert gammas[v] == gamma(small_connected, dt, s, v)
			assert wgammas[v] == pytest.approx(weighted_gamma(small_connected, dt, weights, v))

	def test_tree_phi_matches_distance_table(self, small_tree):
		s = CandidateSet.from_vertices(small_tree.n, [0, 4, 9, 17, 30])
		assert np.allclose(tree_phi_all(small_tree, s), phi_all(small_tree.distances, s))

	def test_tree_phi_rejects_cycles(self, cycle6):
		with pytest.raises(NotATree):
			tree_phi_all(cycle6, CandidateSet.full(6))

	def test_gamma_median_halves_candidates(self, small_connected):
		dt = small_connected.distances
		s = CandidateSet.from_vertices(small_connected.n, range(5, 35))
		v = exact_median(Potential.GAMMA, small_connected, dt, s)
		assert gamma(small_connected, dt, s, v) <= len(s) / 2

	def test_exact_median_breaks_ties_by_smallest_id(self, cycle6):
		# every vertex of a cycle has the same potential
		assert exact_median(Potential.GAMMA, cycle6, cycle6.distances, CandidateSet.full(6)) == 0

	def test_weighted_gamma_median_follows_mass(self, path5):
		weights = np.array([0.0, 0.0, 0.0, 1.0, 1.0])
		assert weighted_gamma_median(path5, path5.distances, weights) == 3


class TestApproximateMedians:
	def test_qualifying_mask(self):
		values = np.array([10.0, 11.0, 12.0, 20.0])
		assert qualifying_mask(values, 0.1).tolist() == [True, True, False, False]
		allowed = np.array([False, True, True, True])
		assert qualifying_mask(values, 0.1, allowed).tolist() == [False, True, True, False]

	def test_worst_qualifying_takes_the_largest(self):
		values = np.array([10.0, 11.0, 12.0, 20.0])
		policy = MedianPolicy(epsilon=0.2, rule=MedianRule.WORST_QUALIFYING)
		assert select_qualifying(values, policy) == 2

	def test_random_qualifying_stays_in_range(self):
		values = np.array([10.0, 11.0, 12.0, 20.0])
		policy = MedianPolicy(epsilon=0.2, rule=MedianRule.RANDOM_QUALIFYING)
		rng = np.random.default_rng(3)
		assert {select_qualifying(values, policy, rng=rng) for _ in range(50)} <= {0, 1, 2}

	def test_scripted_vertex_must_qualify(self):
		values = np.array([10.0, 11.0, 12.0, 20.0])
		policy = MedianPolicy(epsilon=0.1, rule=MedianRule.SCRIPTED, script=[1, 3])
		assert select_qualifying(values, policy, step=0) == 1
		with pytest.raises(ScriptViolation) as info:
			select_qualifying(values, policy, step=1)
		assert info.value.vertex == 3

	def test_script_exhausted_falls_back_to_best(self):
		values = np.array([10.0, 11.0, 12.0])
		policy = MedianPolicy(epsilon=0.5, rule=MedianRule.SCRIPTED, script=[2])
		assert select_qualifying(values, policy, step=1) == 0

	def test_approx_median_within_factor(self, small_connected):
		dt = small_connected.distances
		s = CandidateSet.full(small_connected.n)
		policy = MedianPolicy(potential=Potential.PHI, epsilon=0.3, rule=MedianRule.WORST_QUALIFYING)
		values = phi_all(dt, s)
		v = approx_median(policy, small_connected, dt, s)
		assert values[v] <= 1.3 * values.min() + 1e-9

	def test_selector_advances_its_script(self, path5):
		policy = MedianPolicy(potential=Potential.PHI, epsilon=1.0, rule=MedianRule.SCRIPTED, script=[2, 1])
		selector = MedianSelector(policy)
		s = CandidateSet.full(5)
		assert selector.select(path5, path5.distances, s) == 2
		assert selector.select(path5, path5.distances, s) == 1


class TestStarClosedForms:
	@pytest.mark.parametrize("n", [16, 64, 256])
	def test_closed_forms_match_brute_force(self, n):
		g = star_paths_graph(n)
		dt = g.distances
		r = math.isqrt(n)
		for k in range(r):
			s = pruned_star_set(n, k)
			assert phi(dt, s, 0) == star_center_potential(n, k)
			for p in range(k + 1, r + 1):
				assert phi(dt, s, star_vertex(r, p, 1)) == star_spoke_potential(n, k)

	@pytest.mark.parametrize("n", [16, 64, 256])
	def test_center_is_an_exact_median_of_every_pruned_set(self, n):
		g = star_paths_graph(n)
		for k in range(math.isqrt(n)):
			values = phi_all(g.distances, pruned_star_set(n, k))
			assert values[0] == values.min()
			assert np.array_equal(tree_phi_all(g, pruned_star_set(n, k)), values)

	def test_pruned_set_size(self):
		s = pruned_star_set(16, 2)
		assert len(s) == 1 + 2 + 2 * 4

	def test_non_square_rejected(self):
		with pytest.raises(ValueError):
			star_center_potential(15, 0)
