"""Domain errors raised by the toolkit."""
from typing import Iterable, Optional


class LcmstError(Exception):
    """Base class for every toolkit error."""


class NonPlanarError(LcmstError):
    """Graph has no planar embedding; ``witness`` is a Kuratowski subgraph edge set."""

    def __init__(self, witness: Iterable[tuple[int, int]]):
        self.witness = tuple(sorted(witness))
        super().__init__(f"graph is not planar (witness of {len(self.witness)} edges)")


class DisconnectedError(LcmstError):
    """Graph is not connected."""


class InfiniteDiameterError(LcmstError):
    """Some vertex pair has no path within the length budget."""


class NoBalancedCycleError(LcmstError):
    """No fundamental cycle balances the vertex weights."""


class CycleError(LcmstError):
    """Edge set is not a simple cycle, or a tree edge was passed as a non-tree edge."""


class InfeasibleInstanceError(LcmstError):
    """Some vertex lies farther than h from the root."""

    def __init__(self, message: str, vertex: Optional[int] = None):
        self.vertex = vertex
        super().__init__(message)


class GuessBudgetExceededError(LcmstError):
    """Guess enumeration for a region exceeds the configured budget."""

    def __init__(self, region_id: int, count: int, budget: int):
        self.region_id = region_id
        self.count = count
        super().__init__(
            f"region {region_id} needs {count} guesses, budget is {budget}"
        )


class LayerCapExceededError(LcmstError):
    """Layered expansion would exceed the configured layer cap."""


class TooLargeError(LcmstError):
    """Instance exceeds the exact-oracle caps."""


class PieceBudgetError(LcmstError):
    """Boundary component is longer than the piece budget."""


class ReductionError(LcmstError):
    """Instance kind does not match the requested reduction."""
