"""Exception hierarchy. Each error carries a stable ``code`` string that the
CLI prints and tests match on."""


class SubstratError(Exception):
    code = "Error"


class MissingTargetError(SubstratError):
    code = "MissingTarget"


class RaggedRowsError(SubstratError):
    code = "RaggedRows"


class EmptyFileError(SubstratError):
    code = "EmptyFile"


class IndexOutOfRangeError(SubstratError):
    code = "IndexOutOfRange"


class TargetMissingError(SubstratError):
    code = "TargetMissing"


class SizeTooLargeError(SubstratError):
    code = "SizeTooLarge"


class EmptyViewError(SubstratError):
    code = "EmptyView"


class IncompatibleShapesError(SubstratError):
    code = "IncompatibleShapes"


class EmptyPopulationError(SubstratError):
    code = "EmptyPopulation"


class TooManyCombinationsError(SubstratError):
    code = "TooManyCombinations"


class AdapterError(SubstratError):
    """Base for failures at the AutoML adapter boundary (exit code 2)."""

    code = "AdapterError"


class AdapterUnavailableError(AdapterError):
    code = "AdapterUnavailable"


class AdapterProtocolError(AdapterError):
    code = "AdapterProtocolError"


class AdapterTimeoutError(AdapterError):
    code = "AdapterTimeout"
