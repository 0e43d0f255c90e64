"""Exception hierarchy shared by all modules."""


class SemiMarkovError(Exception):
    """Base class for all library errors."""


class InvalidStochasticMatrix(SemiMarkovError):
    """A transition matrix row does not sum to 1 or has a negative entry."""


class MissingSojournLaw(SemiMarkovError):
    """p_{vw} > 0 but no sojourn law was supplied for the (v, w) entry."""


class NotIrreducible(SemiMarkovError):
    """The support digraph of P is not strongly connected."""


class PeriodicChain(SemiMarkovError):
    """Operation requires an aperiodic chain (period 1, slem < 1)."""


class HorizonExceeded(SemiMarkovError):
    """Query time lies beyond the generated arrivals of a trajectory."""


class QuadratureFailure(SemiMarkovError):
    """Adaptive quadrature did not reach the requested tolerance."""


class TooFewSamples(SemiMarkovError):
    """Statistical test invoked with fewer samples than its gate allows."""


class ParseError(SemiMarkovError):
    """Configuration text is not well-formed."""


class SchemaError(SemiMarkovError):
    """Configuration parsed but violates the schema; names the offending field."""
