"""Exception hierarchy shared across the toolkit.

``InputError`` subclasses signal problems with user-supplied files or
arguments; the CLI maps them to exit code 2 and never prints a traceback
for them.
"""


class ConformanceError(Exception):
    """Base class for all toolkit errors."""


class InputError(ConformanceError):
    """A user-supplied input (file, flag, config) is invalid."""


# static model parsing

class MalformedJson(InputError):
    pass


class MissingField(InputError):
    def __init__(self, path: str):
        super().__init__(f"missing required field: {path}")
        self.path = path


class DuplicateService(InputError):
    def __init__(self, name: str):
        super().__init__(f"duplicate service after normalization: {name!r}")
        self.name = name


class UnknownEndpoint(InputError):
    def __init__(self, flow_index: int, name: str):
        super().__init__(f"flow #{flow_index}: endpoint {name!r} is not a declared service")
        self.flow_index = flow_index
        self.name = name


class EmptyAfterNormalization(InputError):
    def __init__(self, raw: str):
        super().__init__(f"name {raw!r} is empty after normalization")
        self.raw = raw


# event log parsing

class MalformedLine(InputError):
    def __init__(self, line_no: int, reason: str = ""):
        msg = f"malformed event log line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line_no = line_no


class MissingEventField(InputError):
    def __init__(self, line_no: int, field: str):
        super().__init__(f"event log line {line_no}: missing field {field!r}")
        self.line_no = line_no
        self.field = field


# state machines

class MalformedDot(InputError):
    def __init__(self, line_no: int, reason: str = ""):
        msg = f"malformed dot at line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line_no = line_no


class NondeterministicTransition(InputError):
    def __init__(self, state: int, symbol: str):
        super().__init__(f"state {state} has two transitions on {symbol!r}")
        self.state = state
        self.symbol = symbol


class UnreachableState(InputError):
    def __init__(self, state: int):
        super().__init__(f"state {state} is unreachable from the initial state")
        self.state = state


class MalformedSymbol(ConformanceError):
    def __init__(self, machine_name: str, symbol: str):
        super().__init__(f"machine {machine_name!r}: malformed transition symbol {symbol!r}")
        self.machine_name = machine_name
        self.symbol = symbol


# learning / evaluation

class EmptyTraceSet(InputError):
    pass


class AlphabetTooSmall(InputError):
    pass


class CannotAvoidPositives(ConformanceError):
    """Every single-symbol mutant of the trace collides with a training trace."""


class TooFewTraces(InputError):
    pass


# interpretation

class NoInvolvedTransitions(ConformanceError):
    def __init__(self, a: str, b: str):
        super().__init__(f"no transitions between {a!r} and {b!r} in the machine")
        self.a = a
        self.b = b


# scenario generation

class InfeasibleSpec(InputError):
    pass
