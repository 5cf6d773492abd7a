"""Exception types raised by the kit."""


class DomainError(ValueError):
    """An elementary operation was applied outside the region where it is
    differentiable (or defined).

    ``fn`` names the offending operation, ``value`` the primal argument.
    """

    def __init__(self, fn, value, reason=None):
        self.fn = fn
        self.value = value
        msg = f"{fn}: argument {value!r} outside domain"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class PerturbationConfusionError(RuntimeError):
    """A perturbation from a finished differentiation leaked into another one."""


class TapeError(RuntimeError):
    """Misuse of a tape, e.g. combining variables recorded on different tapes."""
