from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Classification thresholds and finite-difference guard bands.

    `complex` and `lagrangian` act on sin^2 and cos^2 of the Kahler angles,
    `equal` on the gap |cos1 - cos2|.
    """

    complex: float = 1e-10
    lagrangian: float = 1e-10
    equal: float = 1e-8
    guard_cos2: float = 1e-4
    guard_sin2: float = 1e-4

    @property
    def eta_sin2(self) -> float:
        return 10.0 * self.complex


DEFAULT_TOL = Tolerances()
