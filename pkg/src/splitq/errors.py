"""Exception hierarchy shared by all splitq modules."""


class SplitQError(Exception):
    """Base class for every error raised by splitq."""


class SignatureMismatch(SplitQError, ValueError):
    """Operands belong to different algebras."""


class NullCoquaternion(SplitQError, ZeroDivisionError):
    """The element has vanishing squared modulus and cannot be inverted."""


class Unrepresentable(SplitQError, ValueError):
    """No polar decomposition exists for the element."""


class NotComplexValued(SplitQError, ValueError):
    """A Hamiltonian carries nonzero j or k components."""


class IncompatibleHamiltonian(SplitQError, ValueError):
    """The Hamiltonian has components the chosen flow does not accept."""


class StepSizeInvalid(SplitQError, ValueError):
    pass


class NonSeparable(SplitQError, ValueError):
    """Leapfrog needs H = T(p) + V(x)."""


class IntegrationDiverged(SplitQError, ArithmeticError):
    """The trajectory left the finite floating-point range."""


class EmptyTrajectory(SplitQError, ValueError):
    pass


class NonUnitDirection(SplitQError, ValueError):
    pass


class WrongSignature(SplitQError, ValueError):
    pass


class NotNormalized(SplitQError, ValueError):
    pass
