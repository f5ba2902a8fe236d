from .exceptions import ValidationError, DimensionError, DomainError, NotTheoremFormError
from .logger import setup_logger

__all__ = ['ValidationError', 'DimensionError', 'DomainError', 'NotTheoremFormError', 'setup_logger']
