class ValidationError(ValueError):
    """Raised when inputs violate a documented domain constraint."""
