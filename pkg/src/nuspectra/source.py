"""Source module for the provenance of tabulated energies."""

from enum import Enum


class Source(str, Enum):
    """Energy source enum."""

    CLOSED_FORM = "closed_form"
    NU_ROOT = "nu_root"
    ORACLE = "oracle"
