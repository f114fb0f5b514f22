import json

import pytest

from nilorbit.group import classify, is_primitive
from nilorbit.linear import general_linear_generators, make_linear_action
from nilorbit.zoo import (
    Catalog,
    CatalogCache,
    CatalogError,
    affine_group,
    catalog_load,
    catalog_store,
    dedup_by_conjugacy,
    gl_order,
    irreducible_solvable_subgroups,
    maximal_candidates,
    prime_power,
    solvable_primitive_catalog,
)

# number of solvable primitive groups per degree, frozen from the catalog build
CATALOG_SIZES = {2: 1, 3: 2, 4: 2, 5: 3, 7: 4, 8: 2, 9: 7, 11: 4, 25: 19, 27: 9, 32: 2}


def test_prime_power():
    assert prime_power(49) == (7, 2)
    assert prime_power(64) == (2, 6)
    assert prime_power(12) is None
    assert gl_order(2, 3) == 48


def test_irreducible_lists():
    assert [m.acting_group.order for m in irreducible_solvable_subgroups(1, 7)] == [1, 2, 3, 6]
    assert [m.acting_group.order for m in irreducible_solvable_subgroups(2, 2)] == [3, 6]
    assert [m.acting_group.order for m in irreducible_solvable_subgroups(2, 3)] == [4, 8, 8, 8, 16, 24, 48]
    for m in irreducible_solvable_subgroups(2, 3):
        assert m.is_irreducible()
        assert classify(m.acting_group).is_solvable


@pytest.mark.parametrize("n,count", sorted(CATALOG_SIZES.items()))
def test_catalog_sizes(catalog, n, count):
    entries = catalog(n)
    assert len(entries) == count
    for e in entries:
        assert e.degree == n
        assert e.flags.is_primitive and e.flags.is_solvable
        assert e.order % n == 0
        assert e.point_stabilizer().order * n == e.order


def test_catalog_orders(catalog):
    assert [e.order for e in catalog(4)] == [12, 24]
    assert [e.order for e in catalog(8)] == [56, 168]
    assert [e.order for e in catalog(32)] == [992, 4960]


def test_catalog_meta():
    _, meta = solvable_primitive_catalog(9)
    assert meta["completeness"] == "complete" and meta["tier"] == 1
    _, meta = solvable_primitive_catalog(32)
    assert meta["route"] == "semilinear" and meta["completeness"] == "complete"
    # the semilinear route alone misses classes at degree 25
    entries, meta = solvable_primitive_catalog(25, "semilinear")
    assert meta["completeness"] == "incomplete" and len(entries) == 12
    _, meta = solvable_primitive_catalog(64)
    assert meta["route"] == "maximal" and meta["completeness"] == "incomplete" and meta["tier"] == 2


def test_rejects_bad_degrees():
    with pytest.raises(CatalogError):
        solvable_primitive_catalog(6)
    with pytest.raises(CatalogError):
        solvable_primitive_catalog(256)


def test_no_conjugate_duplicates(catalog):
    for n, (d, p) in ((8, (3, 2)), (9, (2, 3))):
        agl = affine_group(make_linear_action(general_linear_generators(d, p), p))
        assert agl.order == n * gl_order(d, p)
        entries = catalog(n)
        assert len(dedup_by_conjugacy(entries, agl)) == len(entries)


def test_maximal_candidates_are_irreducible():
    mods = maximal_candidates(4, 2)
    assert mods
    for m in mods:
        assert m.is_irreducible()
        assert is_primitive(affine_group(m))


def test_store_load_round_trip(tmp_path, catalog):
    cat = Catalog()
    for n in (4, 9):
        cat.add_degree(n, catalog(n), solvable_primitive_catalog(n)[1])
    path = tmp_path / "cat.jsonl"
    catalog_store(cat, path)
    again = catalog_load(path)
    assert again.degrees() == [4, 9]
    assert [e.to_json() for e in again.all_entries()] == [e.to_json() for e in cat.all_entries()]
    assert again.is_complete(9)


def test_load_detects_tampering(tmp_path, catalog):
    cat = Catalog()
    cat.add_degree(9, catalog(9), {})
    path = tmp_path / "cat.jsonl"
    catalog_store(cat, path)
    lines = path.read_text().splitlines()
    row = json.loads(lines[0])
    row["order"] = str(int(row["order"]) * 2)
    path.write_text(json.dumps(row) + "\n")
    with pytest.raises(CatalogError):
        catalog_load(path)
    row["order"] = str(int(row["order"]) // 2)
    row["v"] = 99
    path.write_text(json.dumps(row) + "\n")
    with pytest.raises(CatalogError):
        catalog_load(path)


def test_cache_is_idempotent(cache_dir):
    first = CatalogCache()
    entries, meta = first.get(9)
    assert first.constructions == 1
    second = CatalogCache()
    again, meta2 = second.get(9)
    assert second.constructions == 0
    assert meta2 == meta
    assert [e.to_json() for e in again] == [e.to_json() for e in entries]
    with pytest.raises(CatalogError):
        second.get(4, build=False)
