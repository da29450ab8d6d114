"""Exception types shared by the engine modules and the CLI front end.

Every engine error that has something to point at carries a ``witness``
attribute: a small tuple of labels/indices that reproduces the failure when
fed back to the operation that raised it.
"""


class EngineError(Exception):
    """Base class for all engine-level failures."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# --- carriers and tables ---------------------------------------------------

class MalformedTable(EngineError):
    """An operation table or structure map is not total or not well shaped."""


class NoBottomTop(EngineError):
    """The order has no (unique) bottom or top element."""


class UnknownLabel(EngineError):
    """An expression or table row names an element that does not exist."""


class EmptyExpression(EngineError):
    """eval_expr received an empty or all-whitespace expression."""


class JoinNotCommutative(EngineError):
    """The join table is not commutative; the shadow lattice needs it."""


# --- completion -------------------------------------------------------------

class NotDirected(EngineError):
    """A subset has two members with no lower bound inside the subset."""


class HypothesisNotMet(EngineError):
    """A fixture fails the hypothesis of the statement being verified."""


# --- dynamics ---------------------------------------------------------------

class BrokenComposition(EngineError):
    """Transition maps fail the composition law on some triple of times."""


class NonPreserving(EngineError):
    """A transition map breaks order, meet, join, bottom or top."""


class UnknownPredicate(EngineError):
    """observed_truth was asked for a predicate that is not registered."""


class NoSupportInterval(EngineError):
    """No temporal points exist at the requested time."""


class NotAccessible(EngineError):
    """A string is not accessible at the anchor time."""


# --- sheaves ----------------------------------------------------------------

class NotAPoint(EngineError):
    """The element is not a point of the requested kind."""


class NonCommutingSquare(EngineError):
    """A comparison square (or triangle) of linear maps fails to commute."""


class InconsistentDiagram(EngineError):
    """A diagram of linear maps does not compose consistently."""


class PreconditionFailed(EngineError):
    """A verification was invoked on data that fails its stated hypothesis."""


# --- spectral families ------------------------------------------------------

class NotMonotone(EngineError):
    """Levels are not monotone along the index chain."""


class JoinNotTop(EngineError):
    """The join of all levels is not the top element."""


class NotRightBounded(EngineError):
    """No level equals the top element, but a right bound is required."""


class CapExceeded(EngineError):
    """An enumeration grew past its configured cap."""


# --- exact linear algebra ---------------------------------------------------

class DimensionMismatch(EngineError):
    """Matrix shapes do not line up."""


class IrrationalSpectrum(EngineError):
    """The characteristic polynomial does not split over the rationals."""


# --- front end --------------------------------------------------------------

class ModelSyntaxError(EngineError):
    """Malformed model text; carries the 1-based line number."""

    def __init__(self, message, line=None, witness=None):
        super().__init__(message, witness)
        self.line = line


class UnknownReference(EngineError):
    """A block refers to a name that is not defined in the document."""

    def __init__(self, message, line=None, witness=None):
        super().__init__(message, witness)
        self.line = line


class AmbiguousDefaultTable(EngineError):
    """`meet: default` or `join: default` was requested but some pair has
    no unique greatest lower / least upper bound."""
