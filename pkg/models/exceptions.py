"""
Error hierarchy for the level set approximation toolkit
Every failure raised by the library derives from LevelSetError
"""


class LevelSetError(Exception):
    """Base class for all library errors"""


class ConfigError(LevelSetError):
    """Invalid experiment or engine configuration"""


class DepthLimitExceeded(LevelSetError):
    """A cube would be bisected past the exact-representation depth"""


class InvalidGridPoint(LevelSetError):
    """Bump center is not on the grid Z"""


class CubeBudgetExceeded(LevelSetError):
    """Bisection would create more cubes than max_cubes allows"""


class OracleFailure(LevelSetError):
    """The black-box function raised or returned a non-finite value"""


class OutOfCube(LevelSetError):
    """Approximator evaluated outside its owning cube"""


class UnknownSmoothness(LevelSetError):
    """Operation needs a Hölder or gradient-Hölder tag"""


class NoLevelSetSampler(LevelSetError):
    """Containment check requested for an oracle without analytic level set"""


class EmptyLevelSet(LevelSetError):
    """Requested level has no points inside the unit cube"""


class DegenerateInput(LevelSetError):
    """Not enough distinct samples for a rate fit"""


class EmptyInflatedSet(LevelSetError):
    """No grid point falls in the inflated level set at some scale"""


class AccuracyTooLarge(LevelSetError):
    """Accuracy outside the range covered by the lower-bound construction"""


class NondeterministicAlgorithm(LevelSetError):
    """Replayed query transcript diverged from the original run"""


class NoUnqueriedCell(LevelSetError):
    """Every bump support received a query (impossible below |Z| queries)"""
