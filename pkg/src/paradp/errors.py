"""Exception hierarchy.

Everything raised on bad input derives from :class:`ParadpError`; the CLI maps
those to exit code 2.
"""


class ParadpError(Exception):
    pass


class DuplicateElement(ParadpError):
    pass


class AntisymmetryViolation(ParadpError):
    def __init__(self, message, a=None, b=None):
        super().__init__(message)
        self.pair = (a, b)


class UnknownElement(ParadpError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class EmptyAxis(ParadpError, ValueError):
    pass


class PartialMap(ParadpError):
    pass


class ShapeMismatch(ParadpError, ValueError):
    pass


class MonotonicityViolation(ParadpError, ValueError):
    """Carries the witness ``(f, f', r, r')`` as element labels."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InterfaceMismatch(ParadpError, ValueError):
    pass


class KindMismatch(ParadpError, TypeError):
    pass


class InvalidValue(ParadpError, ValueError):
    """An uncertain value breaks its payload invariant (empty set, lo > hi, bad mass)."""


class UnorderedCarrier(ParadpError, TypeError):
    pass


class Mismatch(ParadpError, ValueError):
    pass


class NotAChain(ParadpError, ValueError):
    pass


class IncompatibleUtility(ParadpError, ValueError):
    pass


class ZeroEvidence(ParadpError, ValueError):
    pass


class EmptyFeasibleSet(ParadpError, ValueError):
    pass
