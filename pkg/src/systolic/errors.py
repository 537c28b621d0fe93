"""Exception types shared by the pipeline stages."""


class SystolicError(Exception):
    """Base class for every error raised by this package."""


class InputError(SystolicError, ValueError):
    """Malformed input data (files, presentations, complexes)."""


class UnknownVertex(InputError, KeyError):
    def __init__(self, vertex):
        super().__init__(f"unknown vertex {vertex!r}")
        self.vertex = vertex

    def __str__(self):
        return self.args[0]


class DomainEscape(SystolicError):
    """A partial generator map was evaluated outside its domain.

    This means the finite patch of X is too small for the requested
    computation.
    """

    def __init__(self, vertex, position):
        super().__init__(
            f"vertex {vertex} left the patch at word position {position}; enlarge the patch"
        )
        self.vertex = vertex
        self.position = position


class PatchTooSmall(SystolicError):
    def __init__(self, element, center, needed, available):
        super().__init__(
            f"ball of radius {needed} around h.x0 = {center} (h = {element}) "
            f"reaches the patch boundary (distance {available}); enlarge the patch"
        )
        self.element = element
        self.center = center
        self.needed = needed
        self.available = available


class BallTooSmall(SystolicError):
    def __init__(self, message):
        super().__init__(message + "; increase rho")


class XNotSixLarge(SystolicError):
    """The ambient complex has a 4- or 5-cycle without a diagonal."""

    def __init__(self, cycle):
        super().__init__(f"ambient complex has no diagonal for the cycle {tuple(cycle)}")
        self.cycle = tuple(cycle)


class BudgetExceeded(SystolicError):
    def __init__(self, moves, residual):
        super().__init__(
            f"saturation stopped after {moves} moves with bad loop {tuple(residual.vertices)} left"
        )
        self.moves = moves
        self.residual = residual
