import pytest

from sonar.flows.adversary import run_adversary
from sonar.models.experiment import BoundSpec
from sonar.tasks.verify import verify_bounds
from sonar.utilities.types import BoundMode, GameName


@pytest.mark.integration
class TestAdversaryFlow:
	@pytest.mark.parametrize(
		"name,n,kwargs",
		[
			(GameName.GRID_ADDITIVE, 64, {}),
			(GameName.MUL_MARKING, 400, {"epsilon": 0.1}),
			(GameName.PHI_TRAP, 256, {"epsilon": 0.5}),
			(GameName.CYCLE_ANTIPODAL, 200, {"pairs": 3}),
			(GameName.CYCLE_TWODIR, 100, {}),
			(GameName.PATH_TWO_TARGET, 40, {}),
		],
	)
	def test_floor_is_established(self, name, n, kwargs):
		report, record = run_adversary(name, n, **kwargs)
		assert report.floor_ok
		assert record.bound_ok
		assert record.queries_total == report.forced_queries
		assert verify_bounds.fn([record], BoundSpec(mode=BoundMode.FLOOR)).passed

	def test_cycle_record_is_unbiased(self):
		_, record = run_adversary(GameName.CYCLE_ANTIPODAL, 100, seed=4)
		assert record.p1 == 0.5
		assert record.seed == 4
