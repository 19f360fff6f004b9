"""Random-instance generators shared between property tests."""

from __future__ import annotations

import numpy as np

from mitiplan.catalog import Catalog, Mitigation, Technique
from mitiplan.matrix import DecisionMatrix
from mitiplan.scoring import WeightEntry, WeightVector


def random_decision_matrix(rng, max_m=5, max_n=5, zero_prob=0.35):
    """Small random matrix; every column keeps at least one nonzero cell."""
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    coverage = np.zeros((m, n))
    for j in range(n):
        nonzero = rng.random(m) >= zero_prob
        if not nonzero.any():
            nonzero[int(rng.integers(0, m))] = True
        values = rng.uniform(0.05, 1.0, size=m)
        coverage[:, j] = np.where(nonzero, values, 0.0)
    weights = rng.uniform(0.05, 3.0, size=n)
    return DecisionMatrix(
        mitigation_ids=tuple(f"M{1000 + i}" for i in range(m)),
        technique_ids=tuple(f"T{1000 + j}" for j in range(n)),
        coverage=coverage,
        weights=weights,
        counts=(coverage > 0).sum(axis=0),
    )


def random_catalog_and_weights(rng, max_t=6, max_m=7):
    """Random catalog plus positive weights over its techniques."""
    n = int(rng.integers(2, max_t + 1))
    m = int(rng.integers(2, max_m + 1))
    tids = [f"T{1100 + j}" for j in range(n)]
    mids = [f"M{1100 + i}" for i in range(m)]
    mappings = set()
    for mid in mids:
        picks = int(rng.integers(0, n + 1))
        for tid in rng.choice(tids, size=picks, replace=False):
            mappings.add((mid, str(tid)))
    catalog = Catalog.from_parts(
        [Technique(tid, "") for tid in tids],
        [Mitigation(mid, "") for mid in mids],
        mappings,
    )
    weights = WeightVector.from_entries(
        [WeightEntry(tid, float(rng.uniform(0.1, 3.0)), "") for tid in tids]
    )
    return catalog, weights
