#!/usr/bin/env python3
"""
Error types for jordan-spectral
Every library failure raises a subclass of JordanSpectralError
"""


class JordanSpectralError(Exception):
    """Base class for all library errors"""


class IncompatibleOperandsError(JordanSpectralError):
    """Operands belong to different algebras or have mismatched dimensions"""


class DimensionMismatchError(JordanSpectralError):
    """A module, operator or vector has the wrong dimension"""


class AlgebraFileError(JordanSpectralError):
    """Malformed algebra file; carries the offending line and column"""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class IdentityAxiomError(JordanSpectralError):
    """Declared identity does not act as a two-sided unit"""


class DuplicateTripletError(AlgebraFileError):
    """The same structure-constant index triple appears twice"""


class FlagViolationError(JordanSpectralError):
    """An algebra violates a property its flags declare"""


class PrimeDivisionError(JordanSpectralError):
    """A matrix denominator is divisible by the chosen prime"""


class KernelCertificateError(JordanSpectralError):
    """A kernel candidate fails exact verification"""

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message)


class InconclusiveCertificateError(JordanSpectralError):
    """Kernel dimension bounds did not meet after every configured prime"""

    def __init__(self, message, lower=None, upper=None):
        self.lower = lower
        self.upper = upper
        super().__init__(f"{message} (kernel dimension in [{lower}, {upper}])")


class EmptyModuleError(JordanSpectralError):
    """A bimodule was requested with every sector empty"""


class HomIntertwiningError(JordanSpectralError):
    """A proposed bimodule map fails to intertwine the actions"""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class NonIdempotentError(JordanSpectralError):
    """State construction was given something other than a trace-one idempotent"""


class DegenerateDiracError(JordanSpectralError):
    """Distance queries need a nonzero Dirac operator"""


class ConvergenceError(JordanSpectralError):
    """An iterative estimate failed to reach its tolerance"""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class UsageError(JordanSpectralError):
    """Invalid command-line input"""
