"""Exception types shared across the package."""


class FormatError(ValueError):
    """Malformed or unsupported file content (native container or import)."""


class ManifestError(ValueError):
    """Manifest document violates the schema or its invariants."""


class BackendError(RuntimeError):
    """A style backend failed while processing a request."""


class BackendProtocolError(BackendError):
    """A style backend returned output violating the protocol contract."""
