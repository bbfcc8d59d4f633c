class ValidationError(ValueError):
    """Input data or arguments that violate a documented contract."""
