"""Discretized scene enumeration.

A scene assigns one value to every dimension. Enumeration walks the
Cartesian product in lexicographic order of value indices (first
dimension slowest), drops assignments matching any forbidden
conjunction, and numbers the survivors 0..n-1. Scene ids encode the
value indices, so they are stable under reordering or pruning of
forbidden rules and shift predictably when values are inserted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from hazident.model import SceneCatalog


@dataclass(frozen=True)
class Scene:
    id: str
    index: int
    values: tuple[tuple[str, str], ...]  # (dimension, value) in catalog order
    exceedances: tuple[str, ...]  # names of dimensions holding an exceedance value

    @property
    def exceedance_count(self) -> int:
        return len(self.exceedances)

    def value_of(self, dimension: str) -> str:
        for name, value in self.values:
            if name == dimension:
                return value
        raise KeyError(f"scene has no dimension {dimension!r}")

    def matches(self, literals: tuple[tuple[str, str], ...]) -> bool:
        """True when every dimension=value literal holds (empty matches all)."""
        assigned = dict(self.values)
        return all(assigned.get(dim) == value for dim, value in literals)


def scene_id(value_indices: tuple[int, ...]) -> str:
    return "s" + "-".join(str(i) for i in value_indices)


def enumerate_scenes(catalog: SceneCatalog, max_scenes: int | None = None) -> list[Scene]:
    """All valid scenes in lexicographic order.

    ``max_scenes`` guards callers exploring untrusted configs; exceeding it
    raises ValueError before materializing the full product.
    """
    dimensions = catalog.dimensions
    if not dimensions:
        return []
    exceedance_sets = [frozenset(d.exceedance_values) for d in dimensions]
    names = [d.name for d in dimensions]
    forbidden = [
        [(names.index(dim), value) for dim, value in rule.when] for rule in catalog.forbidden
    ]
    scenes: list[Scene] = []
    for indices in itertools.product(*(range(len(d.values)) for d in dimensions)):
        values = tuple(dimensions[i].values[indices[i]] for i in range(len(dimensions)))
        if any(all(values[i] == v for i, v in rule) for rule in forbidden):
            continue
        if max_scenes is not None and len(scenes) >= max_scenes:
            raise ValueError(f"scene catalog exceeds {max_scenes} valid scenes")
        scenes.append(
            Scene(
                id=scene_id(indices),
                index=len(scenes),
                values=tuple(zip(names, values)),
                exceedances=tuple(
                    names[i] for i in range(len(dimensions)) if values[i] in exceedance_sets[i]
                ),
            )
        )
    return scenes


def candidate_count(catalog: SceneCatalog) -> int:
    """Size of the unconstrained product (before forbidden rules)."""
    count = 1
    for dimension in catalog.dimensions:
        count *= len(dimension.values)
    return count if catalog.dimensions else 0


def scenes_within_budget(scenes: list[Scene], max_exceedances: int) -> list[Scene]:
    """Scenes whose exceedance count stays within the single-fault budget."""
    return [s for s in scenes if s.exceedance_count <= max_exceedances]
