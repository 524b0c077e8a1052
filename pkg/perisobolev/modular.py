"""
Discrete modulars.

Every modular in the package, single or double integral, is assembled as

    M(v) = Σ_r w_r · |(D v)_r|^{P_r}        (divided by P_r when weighted)

with a sparse difference operator D acting on the flattened node values.
Zero extension outside the grid is built in: neighbours that fall outside
the grid have no column in D.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple, Callable
import logging

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

ROUNDOFF_FACTOR = 64.0 * np.finfo(float).eps


class ModularKind(str, Enum):
    """Weight convention and kernel of a modular."""
    LEBESGUE_PLAIN = "lebesgue_plain"
    LEBESGUE_WEIGHTED = "lebesgue_weighted"
    GAGLIARDO = "gagliardo"
    DIRECTIONAL_VAREXP = "directional_varexp"
    PERIDYNAMIC_CONST = "peridynamic_const"

    @property
    def weighted(self) -> bool:
        return self in (ModularKind.LEBESGUE_WEIGHTED, ModularKind.GAGLIARDO)


@dataclass(frozen=True)
class DiscreteModular:
    """
    Sparse representation of a modular.

    Attributes:
        kind: Convention the modular implements
        operator: Sparse (rows × nodes) difference operator
        weights: Quadrature weight per row
        exponents: Exponent per row
        weighted: Divide each term by its exponent
        coarse_weights: Weights of a coarser rule on the same rows, for the error estimate
        aux_operator: Optional operator for an additional a-posteriori bound
        aux_weights: Weights of that bound
        aux_exponents: (p⁻, p⁺) used in the bound max(|t|^{p⁻}, |t|^{p⁺})
        row_nodes: Index of the node each row is attributed to (density output)
        density_shape: Grid shape of the node index space used by row_nodes
        cell_volume: Volume of one outer cell
        smoothing: μ in the regularized power (t² + μ²)^{P/2} - μ^P
    """
    kind: ModularKind
    operator: sp.csr_matrix
    weights: np.ndarray
    exponents: np.ndarray
    weighted: bool = False
    coarse_weights: Optional[np.ndarray] = None
    aux_operator: Optional[sp.csr_matrix] = None
    aux_weights: Optional[np.ndarray] = None
    aux_exponents: Tuple[float, float] = (2.0, 2.0)
    row_nodes: Optional[np.ndarray] = None
    density_shape: Optional[Tuple[int, ...]] = None
    cell_volume: float = 1.0
    smoothing: float = 0.0

    @property
    def rows(self) -> int:
        return self.operator.shape[0]

    @property
    def pminus(self) -> float:
        return float(self.exponents.min()) if self.rows else 2.0

    @property
    def pplus(self) -> float:
        return float(self.exponents.max()) if self.rows else 2.0

    def with_smoothing(self, mu: float) -> "DiscreteModular":
        return replace(self, smoothing=float(mu))

    def scaled(self, factor: float) -> "DiscreteModular":
        """Same modular with every weight multiplied by `factor`."""
        coarse = None if self.coarse_weights is None else self.coarse_weights * factor
        aux = None if self.aux_weights is None else self.aux_weights * factor
        return replace(self, weights=self.weights * factor, coarse_weights=coarse, aux_weights=aux)

    def differences(self, v: np.ndarray) -> np.ndarray:
        return self.operator @ np.ravel(v)

    def _powers(self, t: np.ndarray) -> np.ndarray:
        P = self.exponents
        if self.smoothing > 0.0:
            mu = self.smoothing
            return (t * t + mu * mu) ** (0.5 * P) - mu ** P
        return np.abs(t) ** P

    def _terms(self, t: np.ndarray, weights: np.ndarray) -> np.ndarray:
        terms = weights * self._powers(t)
        if self.weighted:
            terms = terms / self.exponents
        return terms

    def value(self, v: np.ndarray) -> float:
        """M(v)."""
        if self.rows == 0:
            return 0.0
        return float(np.sum(self._terms(self.differences(v), self.weights)))

    def value_unweighted(self, v: np.ndarray) -> float:
        """Σ w|Dv|^P without the 1/P factor, whatever the convention."""
        if self.rows == 0:
            return 0.0
        return float(np.sum(self.weights * self._powers(self.differences(v))))

    def increment(self, v: np.ndarray, dv: np.ndarray) -> float:
        """
        M(v + dv) - M(v) without cancellation against the size of M(v).

        Each row uses φ(t + Δt) - φ(t) = (t² + μ²)^{P/2}·expm1((P/2)·log1p(Δt(2t + Δt)/(t² + μ²)))
        so that line searches can resolve decreases far below eps·M(v).
        """
        if self.rows == 0:
            return 0.0
        t = self.differences(v)
        dt = self.differences(dv)
        P = self.exponents
        base = t * t + self.smoothing ** 2
        zero = base == 0.0
        safe = np.where(zero, 1.0, base)
        with np.errstate(divide='ignore'):
            change = safe ** (0.5 * P) * np.expm1(0.5 * P * np.log1p(dt * (2.0 * t + dt) / safe))
        change = np.where(zero, np.abs(dt) ** P, change)
        terms = self.weights * change
        if self.weighted:
            terms = terms / P
        return float(np.sum(terms))

    def coarse_value(self, v: np.ndarray) -> Optional[float]:
        if self.coarse_weights is None or self.rows == 0:
            return None
        return float(np.sum(self._terms(self.differences(v), self.coarse_weights)))

    def aux_bound(self, v: np.ndarray) -> float:
        if self.aux_operator is None or self.aux_weights is None:
            return 0.0
        t = np.abs(self.aux_operator @ np.ravel(v))
        lo, hi = self.aux_exponents
        return float(np.sum(self.aux_weights * np.maximum(t ** lo, t ** hi)))

    def error_estimate(self, v: np.ndarray) -> float:
        """|fine - coarse| + auxiliary bounds + roundoff floor."""
        value = self.value(v)
        coarse = self.coarse_value(v)
        estimate = abs(value - coarse) if coarse is not None else 0.0
        return estimate + self.aux_bound(v) + ROUNDOFF_FACTOR * abs(value)

    def gradient(self, v: np.ndarray) -> np.ndarray:
        """Gradient of M with respect to the node values."""
        if self.rows == 0:
            return np.zeros(np.size(v))
        t = self.differences(v)
        P = self.exponents
        if self.smoothing > 0.0:
            mu = self.smoothing
            dphi = P * t * (t * t + mu * mu) ** (0.5 * P - 1.0)
        else:
            dphi = P * np.sign(t) * np.abs(t) ** (P - 1.0)
        if self.weighted:
            dphi = dphi / P
        return self.operator.T @ (self.weights * dphi)

    def dual_terms(self, v: np.ndarray) -> np.ndarray:
        """Row-wise w·|t|^{P-2}·t, the integrand of the weak form."""
        t = self.differences(v)
        return self.weights * np.sign(t) * np.abs(t) ** (self.exponents - 1.0)

    def profile(self, v: np.ndarray) -> Callable[[float], float]:
        """
        λ ↦ M(v/λ) with the differences computed once.
        """
        t = np.abs(self.differences(v))
        keep = t > 0
        t = t[keep]
        w = self.weights[keep]
        P = self.exponents[keep]
        if self.weighted:
            w = w / P

        def modular_at(lam: float) -> float:
            return float(np.sum(w * (t / lam) ** P))

        return modular_at

    def node_density(self, v: np.ndarray) -> np.ndarray:
        """
        Row terms accumulated at their nodes, divided by the cell volume.

        For directional modulars this is the pointwise energy density
        x ↦ ∫|u(x+h e_i) - u(x)|^p/|h|^{1+sp} dh on the padded grid.
        """
        if self.row_nodes is None or self.density_shape is None:
            raise ValueError("Modular carries no node attribution")
        terms = self._terms(self.differences(v), self.weights)
        size = int(np.prod(self.density_shape))
        density = np.bincount(self.row_nodes, weights=terms, minlength=size)
        return density.reshape(self.density_shape) / self.cell_volume


def stack_modulars(parts, kind: ModularKind) -> DiscreteModular:
    """
    Concatenate modulars that act on the same unknowns into one.
    """
    parts = [p for p in parts if p is not None and p.rows > 0]
    if not parts:
        raise ValueError("Nothing to stack")
    weighted = {p.weighted for p in parts}
    if len(weighted) != 1:
        raise ValueError("Cannot stack weighted and unweighted modulars")

    def cat_optional(attr):
        arrays = [getattr(p, attr) for p in parts]
        if all(a is None for a in arrays):
            return None
        return np.concatenate([p.weights if a is None else a for p, a in zip(parts, arrays)])

    aux_parts = [p for p in parts if p.aux_operator is not None]
    aux_operator = sp.vstack([p.aux_operator for p in aux_parts]).tocsr() if aux_parts else None
    aux_weights = np.concatenate([p.aux_weights for p in aux_parts]) if aux_parts else None
    aux_exponents = (
        min(p.aux_exponents[0] for p in aux_parts),
        max(p.aux_exponents[1] for p in aux_parts),
    ) if aux_parts else (2.0, 2.0)
    return DiscreteModular(
        kind=kind,
        operator=sp.vstack([p.operator for p in parts]).tocsr(),
        weights=np.concatenate([p.weights for p in parts]),
        exponents=np.concatenate([p.exponents for p in parts]),
        weighted=weighted.pop(),
        coarse_weights=cat_optional('coarse_weights'),
        aux_operator=aux_operator,
        aux_weights=aux_weights,
        aux_exponents=aux_exponents,
        cell_volume=parts[0].cell_volume,
    )


def identity_rows(size: int, nodes: np.ndarray) -> sp.csr_matrix:
    """Rows picking single node values: row r selects node nodes[r]."""
    nodes = np.asarray(nodes, dtype=int)
    data = np.ones(nodes.size)
    return sp.csr_matrix((data, (np.arange(nodes.size), nodes)), shape=(nodes.size, size))
