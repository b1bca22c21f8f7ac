"""Exception hierarchy shared by all regbench modules."""


class RegbenchError(Exception):
    """Base class for every error raised by this package."""


class SchemaMismatchError(RegbenchError):
    """An attribute or domain is unknown to the schema in use."""


class DuplicateAttributeError(RegbenchError):
    """A description carries two different values for one attribute."""


class InconsistentPropertiesError(RegbenchError):
    """Raw presence/colour attributes contradict each other."""


class InvalidSceneError(RegbenchError):
    """A scene violates a structural invariant (object count, ids, target)."""


class UnsupportedPluralError(InvalidSceneError):
    """A trial names more than one target referent."""


class CorpusFormatError(RegbenchError):
    """An input document does not follow the interchange format."""


class ConfigurationError(RegbenchError):
    """A preference order, algorithm spec, or option set is invalid."""


class CapacityError(RegbenchError):
    """An exhaustive enumeration would exceed the configured bound."""


class DegenerateDataError(RegbenchError):
    """A statistical test received data it is undefined for."""


class UndefinedStatisticError(RegbenchError):
    """A summary statistic was requested for an empty sample."""
