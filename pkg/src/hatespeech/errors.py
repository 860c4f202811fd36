"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class HateSpeechError(Exception):
    exit_code = 1


class UsageError(HateSpeechError):
    exit_code = 1


class DataError(HateSpeechError):
    exit_code = 2


class UnknownLabelError(DataError):
    def __init__(self, label, row=None):
        self.label = label
        self.row = row
        where = f" at row {row}" if row is not None else ""
        super().__init__(f"unknown label {label!r}{where}")


class EmptyCorpusError(DataError):
    pass


class VectorFormatError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CheckpointError(DataError):
    pass


class NumericError(HateSpeechError):
    exit_code = 3


class GradientCheckError(HateSpeechError):
    def __init__(self, report):
        self.report = report
        super().__init__("gradient check failed for: " + ", ".join(report.failed))
