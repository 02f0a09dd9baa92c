"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user input: malformed files, out-of-range values, inconsistent configs.

    The CLI maps this to exit code 1; unexpected failures map to exit code 2.
    """
