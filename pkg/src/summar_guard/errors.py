"""Exception types raised by the engine and its front ends."""


class SummarGuardError(Exception):
    """Base class for all engine errors."""


class UnknownAttribute(SummarGuardError):
    def __init__(self, name, schema_names=()):
        self.name = name
        hint = f" (schema: {', '.join(schema_names)})" if schema_names else ""
        super().__init__(f"unknown attribute {name!r}{hint}")


class InvalidHierarchy(SummarGuardError):
    pass


class DuplicateTuple(SummarGuardError):
    pass


class MissingDimensionAttribute(SummarGuardError):
    pass


class NonDimensionGrouping(SummarGuardError):
    pass


class NotApplicable(SummarGuardError):
    pass


class AmbiguousPivotCell(SummarGuardError):
    pass


class NoCommonDimensionAttributes(SummarGuardError):
    pass


class UnionDimensionOverlap(SummarGuardError):
    def __init__(self, overlap):
        self.overlap = sorted(overlap, key=lambda t: tuple(str(v) for v in t))
        super().__init__(
            "union is not defined: dimension tuples appear on both sides: "
            + "; ".join(str(t) for t in self.overlap)
        )


class SchemaMismatch(SummarGuardError):
    pass


class InvalidDeterminant(SummarGuardError):
    pass


class MissingInputProperty(SummarGuardError):
    pass


class UnknownInput(SummarGuardError):
    pass


class UnknownNode(SummarGuardError):
    pass


class DuplicateViewName(SummarGuardError):
    pass


class ExplosionGuard(SummarGuardError):
    pass


class DslSyntaxError(SummarGuardError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"syntax error{where}: {message}")
