import numpy as np
import pytest

from nilorbit.group import symmetric_group
from nilorbit.verify import (
    EXPECTED_INEQUALITY_FAILURES,
    EXPECTED_LARGEST,
    degree27_case,
    imprimitive_lemma24,
    lemma24_counts,
    verify_global_inequalities,
    verify_lemma24,
    verify_nilpotent_order_bounds,
    verify_subset_theorem,
    verify_table1,
)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 32])
def test_lemma24_zero_failures(n):
    rep = verify_lemma24(n)
    assert rep.verdict == "pass"
    assert sum(rep.numbers["failures"].values()) == 0
    assert 4 * rep.numbers["max_cycle_count"] <= 3 * n


def test_lemma24_counts_on_s4():
    res = lemma24_counts(symmetric_group(4), 2)
    assert res["elements"] == 23
    # a transposition sits exactly on the bound: 4*3 = 3*4
    assert res["max_cycle_count"] == 3
    assert not any(int(m.sum()) for m in res["fails"].values())
    res = lemma24_counts(symmetric_group(5), 5)
    # S5 is not affine: a transposition has 4 cycles and 4*4 > 3*5
    assert int(res["fails"]["four_n_le_three_n"].sum()) == 10


def test_imprimitive_examples_are_reported():
    rows = imprimitive_lemma24()
    assert {r["group"] for r in rows} >= {"C2 wr C2", "S3 wr S3"}
    assert all(r["elements"] > 0 for r in rows)


@pytest.mark.parametrize("n", [4, 8, 9, 25, 27, 32])
def test_table1_values(n):
    rep = verify_table1(n)
    assert rep.verdict == "pass"
    assert rep.numbers["value"] == EXPECTED_LARGEST[n]
    assert rep.witnesses and all(w["subgroup_order"] == EXPECTED_LARGEST[n] for w in rep.witnesses)


def test_table1_degree16():
    rep = verify_table1(16)
    assert rep.numbers["value"] == 128 and rep.tier == 1


def test_table1_detects_mismatch(monkeypatch):
    import nilorbit.verify as v

    monkeypatch.setitem(v.EXPECTED_LARGEST, 8, 9)
    rep = verify_table1(8)
    assert rep.verdict == "mismatch"
    assert rep.witnesses


@pytest.mark.parametrize("n", [4, 9, 27])
def test_nilpotent_order_bounds(n):
    rep = verify_nilpotent_order_bounds(n)
    assert rep.verdict == "pass"
    assert rep.numbers["indeterminate"] == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7, 8, 9, 11])
def test_subset_theorem(n):
    rep = verify_subset_theorem(n)
    assert rep.verdict == "pass", rep.witnesses
    for e in rep.numbers["entries"]:
        assert e["route"] == "exhaustive"


def test_subset_theorem_inequality_route():
    rep = verify_subset_theorem(32)
    assert rep.verdict == "pass"
    assert {e["route"] for e in rep.numbers["entries"]} == {"inequality"}


def test_degree27_case():
    rep = degree27_case()
    assert rep.verdict == "pass"
    classes = rep.numbers["order_81_classes"]
    assert rep.numbers["one_class_per_entry"]
    assert len({c["entry_index"] for c in classes}) == len(classes) == 7
    cls = classes[0]
    assert all(c["profile"] == cls["profile"] for c in classes)
    assert cls["profile"] == {1: 1, 3: 44, 9: 36}
    assert cls["max_cycle_count_order3"] <= 15
    assert cls["has_normal_c3_cubed"]
    assert rep.numbers["hand_inequality_lhs"] <= rep.numbers["hand_inequality_rhs"]


def test_global_inequalities_small_scan():
    rep = verify_global_inequalities(dict((n, EXPECTED_LARGEST[n]) for n in (4, 8, 9, 16, 25, 27, 32, 49)), upper=300)
    assert rep.verdict == "pass"
    assert rep.numbers["beta_threshold"] == 96
    assert set(rep.numbers["inequality_one_failures"]) == EXPECTED_INEQUALITY_FAILURES
    # the 3n/4 variant of the cycle bound also fails at 25
    assert set(rep.numbers["inequality_one_failures_three_quarter"]) == EXPECTED_INEQUALITY_FAILURES | {25}


def test_global_inequalities_detect_wrong_set():
    rep = verify_global_inequalities({4: 8, 32: 2**20}, upper=120)
    assert rep.verdict == "fail"
    assert rep.witnesses
