import pytest

from weylfrob.goldens import (compare_golden, golden_ids, golden_terms,
                              load_golden, _drop_quadratic)
from weylfrob.laurent import rat

EXPECTED_IDS = ["C3-k1-m0", "C3-k1-m1", "C3-k2-m1", "C4-k1-m0",
                "C4-k2-m0", "C5-k1-m2", "C6-k1-m2"]


def test_registry_contents():
    assert golden_ids() == EXPECTED_IDS


def test_unknown_id():
    with pytest.raises(KeyError):
        load_golden("Z9-k9-m9")


@pytest.mark.parametrize("gid", EXPECTED_IDS)
def test_reference_potentials_reproduced(gid):
    report = compare_golden(gid)
    assert report.ok, (report.missing, report.extra, report.wrong)
    assert report.matched == len(_drop_quadratic(
        golden_terms(load_golden(gid))))


def test_quadratic_terms_are_ignored():
    terms = {((2, 0, 0, 0), 0): rat(1),      # t1^2: ambiguity, dropped
             ((1, 1, 0, 0), 0): rat(2),      # t1 t2: dropped
             ((0, 0, 0, 0), 2): rat(1),      # E^2: kept
             ((3, 0, 0, -1), 0): rat(1)}     # Laurent cubic: kept
    kept = _drop_quadratic(terms)
    assert ((2, 0, 0, 0), 0) not in kept
    assert ((1, 1, 0, 0), 0) not in kept
    assert ((0, 0, 0, 0), 2) in kept
    assert ((3, 0, 0, -1), 0) in kept
