class ExportError(Exception):
    """Bad input, unresolvable encoder, or a sample that cannot be encoded."""
