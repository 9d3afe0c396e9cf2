"""Housing-stock mapping toolkit.

Turns very-high-resolution orthoimagery and building footprints into
labeled rooftop datasets, trained roof classifiers, evaluation reports,
and GeoJSON classification / change maps.
"""

__version__ = "0.1.0"
