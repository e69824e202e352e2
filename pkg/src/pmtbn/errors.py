"""Exception types raised across the package."""


class PmtbnError(Exception):
    """Base class for all package-specific errors."""


class CycleError(PmtbnError):
    """A directed cycle was found; ``edge`` is one edge on the cycle."""

    def __init__(self, edge: tuple[str, str]):
        self.edge = edge
        super().__init__(f"directed cycle through edge {edge[0]} -> {edge[1]}")


class UnknownNodeError(PmtbnError):
    """A variable name was referenced but never declared."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown variable: {name!r}")


class DuplicateError(PmtbnError):
    """A node, edge, or CPT row was declared more than once."""


class ParseError(PmtbnError):
    """Malformed line in a structure, model, dataset, or whitelist file."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class HeaderMismatchError(PmtbnError):
    """Dataset header is not a permutation of the schema's variable names."""


class UnknownStateLabelError(PmtbnError):
    """A dataset cell holds a label that is not a state of its variable."""

    def __init__(self, row: int, column: str, label: str):
        self.row = row
        self.column = column
        self.label = label
        super().__init__(f"row {row}, column {column!r}: unknown state label {label!r}")


class MissingCptRowError(PmtbnError):
    """A model file lacks the CPT row for some parent assignment."""


class RowSumError(PmtbnError):
    """A CPT row does not sum to 1 within tolerance."""


class IncompleteAssignmentError(PmtbnError):
    """An operation requiring a full assignment saw a missing value."""


class CardinalityMismatchError(PmtbnError):
    """Two factors disagree on the cardinality of a shared variable."""


class VariableNotInScopeError(PmtbnError):
    """A factor operation referenced a variable outside the factor's scope."""


class ImpossibleEvidenceError(PmtbnError):
    """The supplied evidence has probability zero under the model."""


class TooLargeError(PmtbnError):
    """The joint state space is too large for exhaustive enumeration."""


class EmptyDataError(PmtbnError):
    """No complete rows were available for a statistic."""


class EmptyDatasetError(PmtbnError):
    """An evaluation was attempted on a dataset with no rows."""


class DisconnectedError(PmtbnError):
    """The supplied edge set is not a spanning tree of the feature set."""


class SeedFailureError(PmtbnError):
    """A multi-seed study aborted; names the seed whose run failed."""

    def __init__(self, seed: int, cause: Exception):
        self.seed = seed
        super().__init__(f"seed {seed}: {cause}")
