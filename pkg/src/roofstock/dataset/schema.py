"""Closed label schemas for the two classification tasks.

Spellings are canonical and case-sensitive; list order is the canonical
display/keybinding order. A region's data may legitimately lack classes
(some regions have no tarpaulin roofs at all).
"""

from roofstock.errors import ValidationError

ROOF_TYPE_CLASSES = ("Gable", "Hip", "Flat", "No Roof")

ROOF_MATERIAL_CLASSES = (
    "Healthy metal",
    "Irregular metal",
    "Concrete/cement",
    "Blue tarpaulin",
    "Incomplete",
)

TASKS = {
    "roof_type": ROOF_TYPE_CLASSES,
    "roof_material": ROOF_MATERIAL_CLASSES,
}


def task_classes(task: str) -> tuple[str, ...]:
    if task not in TASKS:
        raise ValidationError(f"unknown task {task!r}; expected one of {sorted(TASKS)}")
    return TASKS[task]


def validate_label(task: str, label: str) -> str:
    classes = task_classes(task)
    if label not in classes:
        raise ValidationError(f"label {label!r} is not in the {task} schema {list(classes)}")
    return label
