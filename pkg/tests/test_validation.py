import pytest

from models.distribution import point_mass
from models.instance import Instance
from services.generators import bernoulli, concluding_alternating, exp_blocks, three_point
from services.validation import MODES, is_too_large, validate_instance_before_solve


@pytest.mark.parametrize("mode", MODES)
def test_small_discrete_instance_is_fine(mode):
    assert validate_instance_before_solve(three_point(4, 50), mode) == []


def test_unknown_mode():
    hints = validate_instance_before_solve(three_point(4, 50), "magic")
    assert len(hints) == 1 and "Unknown solve mode" in hints[0]
    assert not is_too_large(hints)


def test_exponential_items_listed():
    hints = validate_instance_before_solve(exp_blocks(9, 50), "exact")
    assert len(hints) == 1
    assert hints[0].startswith("Items 0, 1, 2, 3, 4...")
    assert not is_too_large(hints)


def test_iid_modes_reject_mixed_items():
    inst = concluding_alternating(5, 10)
    for mode in ("single_bin", "budgeted", "threshold"):
        assert validate_instance_before_solve(inst, mode)
    assert validate_instance_before_solve(inst, "exact") == []


def test_ptas_needs_unit_capacity():
    inst = Instance(items=(point_mass(1),), penalty=10, capacity=2)
    assert "capacity 2" in validate_instance_before_solve(inst, "ptas")[0]


def test_budgeted_length_limit():
    hints = validate_instance_before_solve(bernoulli(9, 50), "budgeted")
    assert is_too_large(hints)
    assert "limited to 8 items" in hints[0]


def test_tree_leaf_limit(monkeypatch):
    from config import Config

    monkeypatch.setattr(Config, "TREE_LEAF_CAP", 80)
    assert is_too_large(validate_instance_before_solve(three_point(4, 50), "tree"))
    assert validate_instance_before_solve(three_point(3, 50), "tree") == []
