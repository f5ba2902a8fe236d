class ValidationError(Exception):
    """Raised when input data validation fails"""
    pass

class DimensionError(ValidationError):
    """Raised when matrix or vector shapes do not fit the operation"""
    pass

class DomainError(Exception):
    """Raised when a mathematical precondition of an operation is violated"""
    pass

class NotTheoremFormError(DomainError):
    """Raised when a black-box map cannot be certified as S0 + mu U* A^dag U"""

    def __init__(self, message: str, diagnostics: dict = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
