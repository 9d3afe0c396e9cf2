"""Confusion matrices, macro metrics, cross-region generalization reports."""

from roofstock.evaluation.metrics import ConfusionMatrix, MetricBundle, confusion_matrix, macro_metrics
from roofstock.evaluation.cross_country import CrossCountryCell, cross_country_matrix, evaluate_rows
from roofstock.evaluation.report import emit_report, parse_report_csv

__all__ = [
    "ConfusionMatrix",
    "MetricBundle",
    "confusion_matrix",
    "macro_metrics",
    "CrossCountryCell",
    "cross_country_matrix",
    "evaluate_rows",
    "emit_report",
    "parse_report_csv",
]
