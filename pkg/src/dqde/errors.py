"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or inconsistent input data (file contents, ids, labels)."""


class StoreFormatError(DataError):
    """Invalid or corrupt embedding container."""
