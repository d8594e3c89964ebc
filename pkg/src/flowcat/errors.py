"""Exception types shared across the package."""


class FlowcatError(Exception):
    pass


class CycleError(FlowcatError):
    """A relation whose closure is not antisymmetric.

    ``cycle`` holds one offending cycle as a list of elements, first element
    not repeated at the end.
    """

    def __init__(self, cycle, message=None):
        self.cycle = list(cycle)
        super().__init__(message or "cycle: %s" % " -> ".join(map(str, self.cycle)))


class CapacityError(FlowcatError):
    pass


class EmptyComplexError(FlowcatError):
    pass


class NotMorseError(FlowcatError):
    pass


class LengthError(FlowcatError):
    pass


class TypeMismatchError(FlowcatError):
    pass


class OrderViolationError(FlowcatError):
    pass


class ParseError(FlowcatError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
