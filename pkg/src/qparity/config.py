"""Global numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass
class Tolerances:
    """Single knob for the toolkit's numerical slack.

    atol is used for exactness checks (normalization, unitarity,
    hermiticity), psd_slack for eigenvalue positivity of density
    matrices, and branch_eps is the minimum probability at which a
    measurement branch is considered realizable.
    """

    atol: float = 1e-10
    psd_slack: float = 1e-9
    branch_eps: float = 1e-12


# Mutate fields of this instance to loosen/tighten the whole toolkit.
TOL = Tolerances()
