import json
from fractions import Fraction as F

import pandas as pd
import pytest

from errors import InputError, ParamsMismatch
from models.cnf import Cnf
from models.distribution import point_mass
from models.instance import Instance
from services.exact import optimal_cost_dp
from services.generators import exp_blocks, three_point
from services.ptas import discretize_instance, make_params, ptas_dp
from services.reduction import reduction_instance, symmetrize_2cnf
from utils.formatting import fmt_exact, json_number
from utils.instance_io import (
    instance_from_dict,
    instance_to_dict,
    load_action_table,
    load_instance,
    reduction_sidecar,
    save_action_table,
    save_instance,
)
from utils.reports import CSV_COLUMNS, RunReport, write_csv, write_report


def test_instance_file_round_trip(tmp_path):
    inst = three_point(7, 50)
    path = tmp_path / "tp.json"
    save_instance(inst, str(path))
    back = load_instance(str(path))
    assert back == inst
    assert back.meta["generator"] == "three_point"


def test_runs_are_compressed():
    doc = instance_to_dict(three_point(7, 50))
    assert len(doc["items"]) == 1
    assert doc["items"][0]["repeat"] == 7
    assert doc["penalty"] == "50"


def test_exponential_rates_survive(tmp_path):
    inst = exp_blocks(9, 50)
    path = tmp_path / "exp.json"
    save_instance(inst, str(path))
    assert [d.rate for d in load_instance(str(path)).items] == [d.rate for d in inst.items]


def test_instance_from_hand_written_dict():
    inst = instance_from_dict(
        {
            "penalty": "50",
            "capacity": "3/2",
            "items": ["point:0.4", {"repeat": 2, "dist": {"discrete": [["0", "1/2"], ["1", "1/2"]]}}],
        }
    )
    assert inst.n == 3
    assert inst.capacity == F(3, 2)
    assert inst.items[0] == point_mass(F(2, 5))


def test_integral_capacity_stays_int():
    inst = instance_from_dict({"penalty": 2, "items": ["point:0"], "capacity": "4"})
    assert inst.capacity == 4 and isinstance(inst.capacity, int)


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(InputError):
        load_instance(str(tmp_path / "nope.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_instance(str(bad))
    with pytest.raises(InputError):
        instance_from_dict({"items": ["point:0"]})


def test_usage_table_round_trip(tmp_path, tiny_three_point):
    value, table = optimal_cost_dp(tiny_three_point)
    path = tmp_path / "dp.json"
    save_action_table(table, str(path))
    back = load_action_table(str(path))
    assert back.kind == "usage"
    assert back.value == value
    assert back.actions == table.actions


def test_level_table_params_checked(tmp_path):
    params = make_params(F(3, 10), F(3, 10) ** 4)
    inst = discretize_instance(three_point(3, 50), params)
    _, table = ptas_dp(inst, params)
    path = tmp_path / "ptas.json"
    save_action_table(table, str(path))
    back = load_action_table(str(path), params)
    assert back.params == params
    assert back.actions == table.actions
    with pytest.raises(ParamsMismatch):
        load_action_table(str(path), make_params(F(3, 10)))


def test_unknown_table_kind(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"kind": "tree", "actions": []}))
    with pytest.raises(InputError):
        load_action_table(str(path))


def test_reduction_sidecar():
    art = reduction_instance(symmetrize_2cnf(Cnf(2, ((1, 2),))))
    doc = reduction_sidecar(art)
    assert doc["n_vars"] == 3 and doc["n_clauses"] == 2
    assert doc["blocks"] == {"variable": 3, "mirror": 3, "equivalence": 6, "clause": 2}
    assert doc["capacity"] == {"variable": "111", "mirror": "111", "equivalence": "111111", "clause": "44"}
    assert [e["role"] for e in doc["items"]][:2] == ["X1", "X1'"]
    # a_1: variable digit 1 and the negative equivalence digit 1
    a1 = doc["items"][0]["values"][0]
    assert a1["variable"] == "100" and a1["equivalence"] == "010000"
    assert doc["cnf"].startswith("p cnf 3 2")


# --- reports ---


def test_csv_schema_and_order(tmp_path):
    # fmt: off
    rows = [
        {"prefix": 20, "policy": "fg", "mean_cost": 3.0, "stderr": 0.1, "mean_opened": 2.0,
         "mean_broken": 0.02, "ref_cost": 2.0, "ratio": 1.5},
        {"prefix": 10, "policy": "fg", "mean_cost": 2.0, "stderr": 0.1, "mean_opened": 1.5,
         "mean_broken": 0.01, "ref_cost": 1.5, "ratio": 4 / 3},
    ]
    # fmt: on
    path = tmp_path / "out" / "simulate.csv"
    write_csv(rows, str(path))
    df = pd.read_csv(path)
    assert list(df.columns) == CSV_COLUMNS
    assert df["prefix"].tolist() == [10, 20]


def test_report_json(tmp_path):
    report = RunReport(command=["exact", "-i", "x.json"], params={"mode": "dp"}, results={"value": json_number(F(5, 2))})
    path = tmp_path / "r.json"
    write_report(report, str(path))
    doc = json.loads(path.read_text())
    assert doc["results"]["value"] == "5/2"
    assert doc["command"][0] == "exact"


def test_fmt_exact():
    assert fmt_exact(F(5, 2)) == "5/2 (2.5)"
    assert fmt_exact(F(4, 2)) == "2"
    assert fmt_exact(0.25) == "0.25"


def test_instance_equality_ignores_meta():
    a = Instance(items=(point_mass(0),), penalty=2, meta={"generator": "x"})
    b = Instance(items=(point_mass(0),), penalty=2)
    assert a == b
