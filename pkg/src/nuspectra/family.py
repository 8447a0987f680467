"""Family module for the solvable potential families."""

from enum import Enum


class Family(str, Enum):
    """Potential family enum."""

    COULOMB = "coulomb"
    OSCILLATOR = "oscillator"
    KRATZER = "kratzer"
    MIE = "mie"
