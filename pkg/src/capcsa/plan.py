from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass


@dataclass(frozen=True)
class CapacitorPlan:
    """Shunt capacitor placements as ``(bus id, size in kvar)`` pairs."""

    placements: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        pl = tuple((int(b), float(s)) for b, s in self.placements)
        if any(s < 0 for _, s in pl):
            raise ValueError("capacitor sizes must be >= 0")
        object.__setattr__(self, "placements", pl)

    @classmethod
    def single(cls, bus, kvar):
        return cls(((bus, kvar),))

    @property
    def total_kvar(self):
        return sum(s for _, s in self.placements)

    @property
    def buses(self):
        return [b for b, _ in self.placements]

    def merged(self):
        """Same plan with duplicate buses summed and zero-size entries kept."""
        acc = defaultdict(float)
        for b, s in self.placements:
            acc[b] += s
        return CapacitorPlan(tuple(sorted(acc.items())))

    def __bool__(self):
        return bool(self.placements)
