from robobdd.errors import RoboBddError


class DslError(RoboBddError):
    def __init__(self, message: str, pos=None):
        self.pos = pos
        where = f"{pos}: " if pos is not None else ""
        super().__init__(f"{where}{message}")


class DslSyntaxError(DslError):
    def __init__(self, message: str, pos, expected=None):
        self.expected = expected
        if expected:
            message = f"{message} (expected {expected})"
        super().__init__(message, pos)

    @property
    def line(self):
        return self.pos.line

    @property
    def col(self):
        return self.pos.col


class DuplicateName(DslError):
    pass


class UnknownReference(DslError):
    pass


class LoweringError(DslError):
    pass


class CyclicImport(DslError):
    def __init__(self, chain):
        self.chain = list(chain)
        super().__init__("cyclic import: " + " -> ".join(str(p) for p in self.chain))


class ImportNotFound(LoweringError, FileNotFoundError):
    def __init__(self, path, chain):
        self.path = path
        self.chain = list(chain)
        via = " -> ".join(str(p) for p in self.chain)
        super().__init__(f"file not found: {path}" + (f" (imported via {via})" if via else ""))
