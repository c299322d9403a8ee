"""Branch and bifurcation-event containers shared by the stationary sweep
and the numerical continuation driver."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class BranchPoint:
    eta: float
    Omega: float
    a: np.ndarray
    min_singular_value: float
    arclength: float


@dataclass
class BifurcationEvent:
    kind: str  # "fold" or "pitchfork"
    eta_c: float
    classification: str = "none"  # "supercritical" | "subcritical" | "none"
    emanating_branch_seed: object = None  # AmplitudeSolution
    family_label: str = ""


@dataclass
class Branch:
    points: list[BranchPoint] = field(default_factory=list)
    events: list[BifurcationEvent] = field(default_factory=list)
    family_label: str = ""
    truncation_reason: str | None = None
    # producer-supplied fold refiner: (index of bracketing point) -> (eta_c, BranchPoint)
    fold_refiner: object = field(default=None, repr=False, compare=False)

    @property
    def etas(self):
        return np.array([p.eta for p in self.points])

    @property
    def omegas(self):
        return np.array([p.Omega for p in self.points])

    @property
    def sigma(self):
        return getattr(self, "_sigma", None)
