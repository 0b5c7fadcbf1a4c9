"""Golden-file regression: default-scenario exports must not drift.

The reference files under ``tests/golden`` were produced by the same
export path and are compared byte for byte, so any change to planning,
the optimizer, the thermal chain, or the output formatting shows up
here even when every behavioral test still passes.  Regenerate the
files deliberately (and review the diff) when an intentional change
lands:

    python3 -c "from pathlib import Path; \
        from ecosplit.config import default_scenario; \
        from ecosplit.harness import export, run_case; \
        s = default_scenario(); \
        [export(run_case(s, planner=p, controller=c), \
                Path('tests/golden') / f'{p}_{c}', scenario=s) \
         for p, c in (('baseline', 'rule'), ('eco', 'dp'))]"
"""
from pathlib import Path

import pytest

from ecosplit.harness import export, run_case

GOLDEN_ROOT = Path(__file__).parent / "golden"
CASES = (("baseline", "rule"), ("eco", "dp"))


@pytest.mark.parametrize("planner,controller", CASES)
def test_default_case_matches_golden_export(tmp_path, scenario, planner, controller):
    case = run_case(scenario, planner=planner, controller=controller)
    paths = export(case, tmp_path, scenario=scenario)
    golden_dir = GOLDEN_ROOT / f"{planner}_{controller}"
    golden_names = sorted(p.name for p in golden_dir.iterdir())
    assert sorted(p.name for p in paths) == golden_names
    for name in golden_names:
        fresh = (tmp_path / name).read_bytes()
        pinned = (golden_dir / name).read_bytes()
        assert fresh == pinned, f"{name} drifted from the pinned reference"
