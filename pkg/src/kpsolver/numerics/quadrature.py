"""
Quadrature rules on the truncated half-line [-L/2, 0].

Two rules discretise the integral in the GLM equation:

- the left-hand Riemann rule, uniform nodes with every weight equal to
  h = L/M (the weight is applied to all M/2 + 1 nodes, as in the matrix
  form I - hQ of the GLM-RR system);
- Clenshaw-Curtis quadrature at the M/2 + 1 Chebyshev extreme points, with
  weights from the explicit cosine-sum formula.

Nodes are stored in ascending order and the last node is exactly 0, so the
last entry of any solution vector belongs to zeta = 0.
"""

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np


class QuadratureError(ValueError):
    """Raised for inadmissible interval lengths or node counts."""

    pass


class RuleKind(str, enum.Enum):
    RIEMANN = "riemann"
    CLENSHAW_CURTIS = "clenshaw-curtis"


@dataclass(frozen=True)
class QuadratureRule:
    """
    Nodes and weights on [-L/2, 0].

    Attributes:
        kind: Which rule produced the nodes
        nodes: Ascending node array of length M/2 + 1, first -L/2, last 0
        weights: Positive weights, same length as nodes
        interval_length: L/2
    """

    kind: RuleKind
    nodes: np.ndarray
    weights: np.ndarray
    interval_length: float

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def M(self) -> int:
        return 2 * (len(self.nodes) - 1)

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Apply the rule to a vectorised integrand."""
        return float(np.dot(self.weights, f(self.nodes)))


def _check(L: float, M: int) -> int:
    if not L > 0 or not np.isfinite(L):
        raise QuadratureError(f"Interval length must be positive, got L={L}")
    if int(M) != M or M < 2 or M % 2:
        raise QuadratureError(f"M must be an even integer >= 2, got M={M}")
    return int(M) // 2


def _freeze(rule_kind: RuleKind, nodes, weights, L: float) -> QuadratureRule:
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(rule_kind, nodes, weights, L / 2.0)


def riemann_rule(L: float, M: int) -> QuadratureRule:
    """
    Left-hand Riemann rule with separation h = L/M.

    Args:
        L: Full domain length; the rule covers [-L/2, 0]
        M: Even number of panels on [-L/2, L/2]

    Raises:
        QuadratureError: If L <= 0 or M is not an even integer >= 2
    """
    n = _check(L, M)
    h = L / M
    nodes = np.linspace(-L / 2.0, 0.0, n + 1)
    nodes[0] = -L / 2.0
    nodes[-1] = 0.0
    return _freeze(RuleKind.RIEMANN, nodes, np.full(n + 1, h), L)


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """
    Clenshaw-Curtis weights for the n + 1 points cos(j pi / n) on [-1, 1].

    Uses the O(n^2) cosine sum; the weights add up to 2.
    """
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    inner = theta[1:-1]
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
        v -= np.cos(n * inner) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    return w


def clenshaw_curtis_rule(L: float, M: int) -> QuadratureRule:
    """
    Clenshaw-Curtis rule with n = M/2 on [-L/2, 0].

    Reference node cos(j pi / n) maps to -(L/4)(cos(j pi / n) + 1), so j = 0
    lands on -L/2 and j = n on 0; reference weights scale by L/4.

    Args:
        L: Domain length; the rule covers the half-interval [-L/2, 0]
        M: Even quadrature parameter, giving M/2 + 1 nodes

    Returns:
        Rule with ascending nodes ending exactly at 0 and positive weights

    Raises:
        QuadratureError: If L <= 0 or M is not an even integer >= 2
    """
    n = _check(L, M)
    reference = np.cos(np.pi * np.arange(n + 1) / n)
    nodes = -(L / 4.0) * (reference + 1.0)
    nodes[0] = -L / 2.0
    nodes[-1] = 0.0
    weights = clenshaw_curtis_weights(n) * (L / 4.0)
    return _freeze(RuleKind.CLENSHAW_CURTIS, nodes, weights, L)


def make_rule(kind: RuleKind, L: float, M: int) -> QuadratureRule:
    if RuleKind(kind) is RuleKind.RIEMANN:
        return riemann_rule(L, M)
    return clenshaw_curtis_rule(L, M)
