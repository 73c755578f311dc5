"""Exception hierarchy shared by every module."""


class CtrlImprovError(Exception):
    """Base class for library errors."""


class ConfigurationError(CtrlImprovError, ValueError):
    """Inputs that cannot be combined, e.g. automata over different alphabets."""


class PreconditionError(CtrlImprovError, ValueError):
    """An operation was called on an input outside its domain."""


class InconsistentInputError(CtrlImprovError, ValueError):
    """Counts or automata that contradict each other (e.g. |A| > |I|)."""


class UnsupportedAutomatonError(CtrlImprovError, ValueError):
    """Automaton kinds the library refuses to handle (PFAs)."""


class ResourceLimitError(CtrlImprovError, RuntimeError):
    """A configured cap (subsets, diameter, solver conflicts) was exceeded."""


class DeterminizationLimitError(ResourceLimitError):
    pass


class SolverError(CtrlImprovError, RuntimeError):
    """A solver backend misbehaved (bad model, malformed output, disagreement)."""
