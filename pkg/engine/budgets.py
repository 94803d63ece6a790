"""
Query budgets
Iteration counts, worst-case upper bounds and minimax lower bounds as closed forms
"""
import math

from models.exceptions import UnknownSmoothness
from oracles.oracle import GRAD_HOLDER, HOLDER, SmoothnessTag

# Guards the ceiling against log2 round-off on exact powers of two
_CEIL_SLACK = 1e-12


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def iterations_needed(epsilon: float, b: float, beta: float) -> int:
    """max(0, ceil((1/beta) log2(2b/epsilon)))"""
    _check_positive(epsilon=epsilon, b=b, beta=beta)
    exponent = math.log2(2.0 * b / epsilon) / beta
    return max(0, math.ceil(exponent - _CEIL_SLACK))


def generic_budget(k: int, b: float, beta: float, d: int, epsilon: float) -> float:
    """2 8^d k (2b)^(d/beta) / epsilon^(d/beta) for any (b, beta)-accurate strategy; 0 once epsilon >= 2b"""
    _check_positive(k=k, b=b, beta=beta, d=d, epsilon=epsilon)
    if epsilon >= 2.0 * b:
        return 0.0
    rate = d / beta
    return 2.0 * 8.0 ** d * k * (2.0 * b) ** rate / epsilon ** rate


def worst_case_budget(tag: SmoothnessTag, d: int, epsilon: float) -> float:
    """Query count after which the Hölder or gradient-Hölder strategy is guaranteed epsilon-accurate"""
    _check_positive(d=d, epsilon=epsilon)
    if tag.kind == HOLDER:
        return generic_budget(1, tag.constant, tag.exponent, d, epsilon)
    if tag.kind == GRAD_HOLDER:
        b = tag.constant * d
        if epsilon >= 2.0 * b:
            return 0.0
        rate = d / (1.0 + tag.exponent)
        return 2.0 * 16.0 ** d * (2.0 * b) ** rate / epsilon ** rate
    raise UnknownSmoothness(f"No worst-case budget for smoothness {tag.kind}")


def lower_bound(tag: SmoothnessTag, d: int, epsilon: float) -> float:
    """Queries any deterministic algorithm needs in the worst case over the class"""
    _check_positive(d=d, epsilon=epsilon)
    if tag.kind == HOLDER:
        rate = d / tag.exponent
        return (tag.constant / (12.0 * d)) ** rate * epsilon ** -rate
    if tag.kind == GRAD_HOLDER:
        rate = d / (1.0 + tag.exponent)
        return (tag.constant / (528.0 * d)) ** rate * epsilon ** -rate
    raise UnknownSmoothness(f"No lower bound for smoothness {tag.kind}")


def spike_lower_bound(c: float, gamma: float, d: int, epsilon: float) -> float:
    """(1/4 (c/2)^(1/gamma))^d epsilon^(-d/gamma), from hiding one spike among disjoint cells"""
    _check_positive(c=c, gamma=gamma, d=d, epsilon=epsilon)
    return (0.25 * (c / 2.0) ** (1.0 / gamma)) ** d * epsilon ** (-d / gamma)
