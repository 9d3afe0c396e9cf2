from collections import Counter

import pytest

from roofstock.errors import ValidationError
from roofstock.dataset.balance import oversample
from roofstock.dataset.manifest import ManifestRow


def rows_with_counts(task, counts):
    rows = []
    i = 0
    for cls, n in counts.items():
        for _ in range(n):
            rows.append(ManifestRow(tile_id=f"t{i:05d}", tile_path=f"{i}.png", country="c",
                                    source="drone", **{task: cls}))
            i += 1
    return rows


def class_counts(rows, task):
    return Counter(r.label(task) for r in rows)


def test_three_one_balances_to_three_three():
    rows = rows_with_counts("roof_type", {"Gable": 3, "Hip": 1})
    out = oversample(rows, "roof_type", seed=0)
    assert class_counts(out, "roof_type") == {"Gable": 3, "Hip": 3}


def test_already_balanced_is_unchanged():
    rows = rows_with_counts("roof_type", {"Gable": 4, "Hip": 4})
    assert oversample(rows, "roof_type", seed=0) == rows


def test_train_column_counts_balance_to_majority():
    # per-class train counts with majority 1,934: every class ends at 1,934
    counts = {"Healthy metal": 1934, "Irregular metal": 1733, "Concrete/cement": 1240,
              "Blue tarpaulin": 1094, "Incomplete": 1331}
    out = oversample(rows_with_counts("roof_material", counts), "roof_material", seed=42)
    assert set(class_counts(out, "roof_material").values()) == {1934}
    assert len(out) == 1934 * 5


def test_originals_all_retained_and_additions_are_copies():
    rows = rows_with_counts("roof_material", {"Healthy metal": 5, "Incomplete": 2})
    out = oversample(rows, "roof_material", seed=1)
    out_counter = Counter(r.tile_id for r in out)
    for r in rows:
        assert out_counter[r.tile_id] >= 1
    extras = [r for r in out[len(rows):]]
    assert all(r.label("roof_material") == "Incomplete" for r in extras)


def test_absent_class_not_synthesized():
    rows = rows_with_counts("roof_material", {"Healthy metal": 4, "Incomplete": 2})
    out = oversample(rows, "roof_material", seed=5)
    assert "Blue tarpaulin" not in class_counts(out, "roof_material")


def test_deterministic_for_fixed_seed():
    rows = rows_with_counts("roof_type", {"Gable": 9, "Hip": 2, "Flat": 5})
    a = oversample(rows, "roof_type", seed=8)
    b = oversample(rows, "roof_type", seed=8)
    assert [r.tile_id for r in a] == [r.tile_id for r in b]


def test_unlabeled_row_rejected():
    rows = [ManifestRow(tile_id="x", tile_path="x.png", country="c", source="drone")]
    with pytest.raises(ValidationError):
        oversample(rows, "roof_type")
