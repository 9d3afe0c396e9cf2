import pytest

from roofstock.errors import ValidationError
from roofstock.dataset.manifest import DatasetManifest, ManifestRow
from roofstock.dataset.split import stratified_split, class_test_count


def make_rows(task, spec):
    """spec: list of (class, n_drone, n_aircraft) tuples."""
    rows = []
    i = 0
    for cls, n_drone, n_aircraft in spec:
        for _ in range(n_drone):
            rows.append(ManifestRow(tile_id=f"t{i:05d}", tile_path=f"t{i}.png", country="c",
                                    source="drone", **{task: cls}))
            i += 1
        for _ in range(n_aircraft):
            rows.append(ManifestRow(tile_id=f"t{i:05d}", tile_path=f"t{i}.png", country="c",
                                    source="aircraft", **{task: cls}))
            i += 1
    return rows


def test_rounding_rule():
    assert class_test_count(10, 0.2) == 2
    assert class_test_count(3322, 0.2) == 664
    assert class_test_count(12, 0.2) == 2  # 2.4 rounds down
    assert class_test_count(13, 0.2) == 3  # 2.6 rounds up
    assert class_test_count(12, 0.5) == 6
    assert class_test_count(25, 0.5) == 12  # 12.5: exact half breaks downward


def test_ten_rows_six_drone_gives_two_drone_test_rows():
    manifest = DatasetManifest(rows=make_rows("roof_type", [("Gable", 6, 4)]))
    result = stratified_split(manifest, "roof_type", seed=1)
    test_rows = result.rows_for_split("test")
    assert len(test_rows) == 2
    assert all(r.source == "drone" for r in test_rows)
    assert len(result.rows_for_split("train")) == 8


def test_partition_property():
    manifest = DatasetManifest(rows=make_rows("roof_material", [
        ("Healthy metal", 40, 20), ("Irregular metal", 25, 10), ("Incomplete", 15, 0),
    ]))
    result = stratified_split(manifest, "roof_material", seed=3)
    train = {r.tile_id for r in result.rows_for_split("train")}
    test = {r.tile_id for r in result.rows_for_split("test")}
    assert train & test == set()
    assert train | test == {r.tile_id for r in manifest.rows}


def test_aircraft_rows_never_in_test():
    manifest = DatasetManifest(rows=make_rows("roof_type", [("Gable", 30, 70), ("Hip", 40, 10)]))
    result = stratified_split(manifest, "roof_type", seed=7)
    assert all(r.source == "drone" for r in result.rows_for_split("test"))
    aircraft = [r for r in result.rows if r.source == "aircraft"]
    assert all(r.split == "train" for r in aircraft)


def test_per_class_share_within_one_row_of_target():
    spec = [("Gable", 83, 21), ("Hip", 17, 40), ("Flat", 55, 0), ("No Roof", 9, 3)]
    manifest = DatasetManifest(rows=make_rows("roof_type", spec))
    result = stratified_split(manifest, "roof_type", test_frac=0.2, seed=11)
    counts = result.class_counts("roof_type", split="test")
    for cls, n_drone, n_aircraft in spec:
        total = n_drone + n_aircraft
        assert abs(counts.get(cls, 0) - 0.2 * total) <= 1.0


def test_fixed_seed_is_deterministic():
    manifest = DatasetManifest(rows=make_rows("roof_type", [("Gable", 50, 10), ("Hip", 30, 5)]))
    a = stratified_split(manifest, "roof_type", seed=42)
    b = stratified_split(manifest, "roof_type", seed=42)
    assert [(r.tile_id, r.split) for r in a.rows] == [(r.tile_id, r.split) for r in b.rows]
    c = stratified_split(manifest, "roof_type", seed=43)
    assert [(r.tile_id, r.split) for r in a.rows] != [(r.tile_id, r.split) for r in c.rows]


def test_insufficient_drone_rows_errors_naming_class():
    manifest = DatasetManifest(rows=make_rows("roof_type", [("Gable", 50, 0), ("Flat", 1, 49)]))
    with pytest.raises(ValidationError, match="Flat"):
        stratified_split(manifest, "roof_type", seed=2)


def test_unlabeled_rows_error():
    rows = make_rows("roof_type", [("Gable", 10, 0)])
    rows.append(ManifestRow(tile_id="zz", tile_path="zz.png", country="c", source="drone"))
    with pytest.raises(ValidationError, match="unlabeled"):
        stratified_split(DatasetManifest(rows=rows), "roof_type")


def test_seed_recorded_in_result():
    manifest = DatasetManifest(rows=make_rows("roof_type", [("Gable", 10, 0)]))
    assert stratified_split(manifest, "roof_type", seed=77).seed == 77
