"""Interval Agreement Approach fuzzy sets for expert elicitation, and risk-score moderation."""

from importlib import resources

__version__ = "0.1.0"

from .errors import (  # noqa: E402, F401
    DegenerateSetError,
    DomainError,
    EmptyPanelError,
    IAAError,
    NotFoundError,
    ValidationError,
)
from .fuzzy_core import (  # noqa: E402, F401
    AgreementT1,
    Interval,
    MembershipFunction,
    RatingScale,
    ZSliceSet,
    aggregate_zgt2,
    build_iaa,
    centroid_t1,
    centroid_zgt2,
    jaccard,
    membership,
    sample,
    secondary_grade,
    zslice,
)


def data_path(name: str):
    """Path to a bundled fixture CSV, e.g. ``data_path("demo_panel.csv")``."""
    return resources.files(__name__) / "data" / name
