"""
Finite-type vertex weight distributions.

A ``WeightModel`` is the law of the limiting weight W: finitely many atoms
a_1 < ... < a_K with probabilities p_1, ..., p_K. A ``WeightSequence`` is a
concrete finite-n weight vector w_1, ..., w_n whose entries are atoms of a
model, together with the generalized random graph edge probabilities it
induces.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from functools import cached_property

import numpy as np

from annealed_ldp.core.exceptions import WeightValidationError

logger = logging.getLogger(__name__)

PROBABILITY_SUM_TOLERANCE = 1e-12
RENORMALIZATION_WARNING_THRESHOLD = 1e-9


@dataclass(frozen=True)
class WeightModel:
    """
    Finite-support weight law with cached first and second moments.

    Prefer ``make_finite_type`` for construction: it renormalizes rounded
    probabilities, while the constructor insists they already sum to 1.
    """

    atoms: tuple[float, ...]
    probs: tuple[float, ...]
    renormalized: bool = False
    mean: float = field(init=False)
    second_moment: float = field(init=False)

    def __post_init__(self):
        _validate_atoms(self.atoms)
        if len(self.probs) != len(self.atoms):
            msg = f"Got {len(self.atoms)} atoms but {len(self.probs)} probabilities"
            raise WeightValidationError(msg)
        if any(p < 0 or not math.isfinite(p) for p in self.probs):
            msg = f"Probabilities must be finite and nonnegative: {self.probs}"
            raise WeightValidationError(msg)
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            msg = f"Probabilities sum to {total!r}, expected 1"
            raise WeightValidationError(msg)

        mean = math.fsum(p * a for a, p in zip(self.atoms, self.probs, strict=True))
        second = math.fsum(p * a * a for a, p in zip(self.atoms, self.probs, strict=True))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "second_moment", second)

    @property
    def size(self) -> int:
        return len(self.atoms)

    @cached_property
    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms and probabilities restricted to positive mass, as read-only arrays."""
        mask = np.asarray(self.probs) > 0.0
        atoms = np.asarray(self.atoms, dtype=float)[mask]
        probs = np.asarray(self.probs, dtype=float)[mask]
        atoms.setflags(write=False)
        probs.setflags(write=False)
        return atoms, probs

    @property
    def is_single_type(self) -> bool:
        """True when all mass sits on one atom, so W is deterministic."""
        return len(self.support[0]) == 1

    @property
    def min_atom(self) -> float:
        return float(self.support[0][0])

    @property
    def max_atom(self) -> float:
        return float(self.support[0][-1])

    def expect(self, values: np.ndarray) -> float:
        """E[f(W)] for values f(a_k) evaluated on the support."""
        return float(self.support[1] @ values)

    def scaled(self, factor: float) -> "WeightModel":
        """The same law with every atom multiplied by ``factor``."""
        return make_finite_type([a * factor for a in self.atoms], self.probs)

    @classmethod
    def from_counts(cls, counts: Sequence[int], atoms: Sequence[float]) -> "WeightModel":
        """Empirical law p_k = n_k / n; see ``counts_to_model`` for the matching sequence."""
        model, _ = counts_to_model(counts, atoms)
        return model


@dataclass(frozen=True)
class WeightSequence:
    """Per-vertex weights of a finite generalized random graph."""

    weights: tuple[float, ...]
    total_weight: float = field(init=False)

    def __post_init__(self):
        if not self.weights:
            msg = "A weight sequence needs at least one vertex"
            raise WeightValidationError(msg)
        if any(w <= 0 or not math.isfinite(w) for w in self.weights):
            msg = "Vertex weights must be finite and strictly positive"
            raise WeightValidationError(msg)
        object.__setattr__(self, "total_weight", math.fsum(self.weights))

    def __len__(self) -> int:
        return len(self.weights)

    def edge_probability(self, i: int, j: int) -> float:
        """p_ij = w_i w_j / (l_n + w_i w_j)."""
        product = self.weights[i] * self.weights[j]
        return product / (self.total_weight + product)

    def edge_probabilities(self) -> np.ndarray:
        """Full matrix of edge probabilities with a zero diagonal."""
        w = np.asarray(self.weights, dtype=float)
        products = np.outer(w, w)
        matrix = products / (self.total_weight + products)
        np.fill_diagonal(matrix, 0.0)
        return matrix


def _validate_atoms(atoms: Sequence[float]) -> None:
    if len(atoms) == 0:
        msg = "A weight model needs at least one atom"
        raise WeightValidationError(msg)
    if any(a <= 0 or not math.isfinite(a) for a in atoms):
        msg = f"Atoms must be finite and strictly positive: {tuple(atoms)}"
        raise WeightValidationError(msg)
    if len(set(atoms)) != len(atoms):
        msg = f"Duplicate atoms: {tuple(atoms)}"
        raise WeightValidationError(msg)
    if any(b <= a for a, b in zip(atoms, atoms[1:], strict=False)):
        msg = f"Atoms must be strictly increasing: {tuple(atoms)}"
        raise WeightValidationError(msg)


def make_finite_type(
    atoms: Sequence[float],
    probs: Sequence[float],
    *,
    sort: bool = False,
) -> WeightModel:
    """
    Build a validated finite-type weight model.

    Args:
        atoms: Weight values, strictly increasing unless ``sort`` is set
        probs: Nonnegative masses; renormalized to sum to exactly 1
        sort: Sort (atom, prob) pairs by atom before validating

    Returns:
        WeightModel with cached moments
    """
    atoms = [float(a) for a in atoms]
    probs = [float(p) for p in probs]
    if len(atoms) != len(probs):
        msg = f"Got {len(atoms)} atoms but {len(probs)} probabilities"
        raise WeightValidationError(msg)
    if sort:
        pairs = sorted(zip(atoms, probs, strict=True))
        atoms = [a for a, _ in pairs]
        probs = [p for _, p in pairs]
    _validate_atoms(atoms)
    if any(p < 0 or not math.isfinite(p) for p in probs):
        msg = f"Probabilities must be finite and nonnegative: {tuple(probs)}"
        raise WeightValidationError(msg)

    total = math.fsum(probs)
    if total <= 0:
        msg = "At least one probability must be positive"
        raise WeightValidationError(msg)
    renormalized = abs(total - 1.0) > RENORMALIZATION_WARNING_THRESHOLD
    if renormalized:
        logger.warning(f"Weight probabilities sum to {total:.12g}. Normalizing.")
    normalized = [p / total for p in probs]
    return WeightModel(tuple(atoms), tuple(normalized), renormalized=renormalized)


def moments(model: WeightModel) -> tuple[float, float]:
    """Return (E[W], E[W^2])."""
    return model.mean, model.second_moment


def counts_to_model(
    counts: Sequence[int],
    atoms: Sequence[float],
) -> tuple[WeightModel, WeightSequence]:
    """
    Empirical weight law of a finite-type sequence.

    Args:
        counts: Number of vertices carrying each atom
        atoms: The atom values, strictly increasing

    Returns:
        (model with p_k = n_k / n, sequence listing n_k copies of a_k)
    """
    if len(counts) == 0:
        msg = "Counts must not be empty"
        raise WeightValidationError(msg)
    if len(counts) != len(atoms):
        msg = f"Got {len(counts)} counts but {len(atoms)} atoms"
        raise WeightValidationError(msg)
    if any(int(c) != c or c < 0 for c in counts):
        msg = f"Counts must be nonnegative integers: {tuple(counts)}"
        raise WeightValidationError(msg)
    n = sum(int(c) for c in counts)
    if n == 0:
        msg = "At least one count must be positive"
        raise WeightValidationError(msg)

    model = make_finite_type(atoms, [int(c) / n for c in counts])
    weights = tuple(float(a) for a, c in zip(atoms, counts, strict=True) for _ in range(int(c)))
    return model, WeightSequence(weights)


def largest_remainder_counts(model: WeightModel, n: int) -> tuple[int, ...]:
    """Round n * p_k to integer counts that sum to exactly n."""
    if n < 1:
        msg = f"Need at least one vertex, got n={n}"
        raise WeightValidationError(msg)
    raw = [n * p for p in model.probs]
    counts = [math.floor(r) for r in raw]
    shortfall = n - sum(counts)
    order = sorted(range(len(raw)), key=lambda k: (counts[k] - raw[k], k))
    for k in order[:shortfall]:
        counts[k] += 1
    return tuple(counts)
