"""Exception hierarchy shared by all pipeline stages."""


class RoboBddError(Exception):
    """Base class for every error raised by the toolchain."""


class UnknownPrefix(RoboBddError, KeyError):
    def __init__(self, token: str, reason: str = "unknown prefix"):
        self.token = token
        super().__init__(f"{reason}: {token!r}")

    def __str__(self):
        return self.args[0]


class JsonLdError(RoboBddError):
    pass


class JsonLdSyntaxError(JsonLdError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{message} at line {line}, column {col}")


class MissingId(JsonLdError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"node object without @id at {path}")


class MalformedPattern(RoboBddError):
    pass


class UnboundTemplateVariable(RoboBddError):
    pass


class MalformedQuery(RoboBddError):
    pass


class NonConformingGraph(RoboBddError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"graph does not conform: {len(report.violations)} violation(s)")


class UnboundVariable(RoboBddError):
    pass


class CoordinationError(RoboBddError):
    """The harness could not line up a clause with the execution data."""


class MissingEvent(CoordinationError):
    def __init__(self, event: str, detail: str = "event not present in trace"):
        self.event = event
        super().__init__(f"{detail}: {event}")


class UnresolvedBinding(CoordinationError):
    pass


class EmptySample(RoboBddError):
    pass
