from .file_storage import FileStorage, dumps

__all__ = ['FileStorage', 'dumps']
