"""Exception hierarchy shared across the package."""


class MitiplanError(Exception):
    """Base class for all mitiplan errors."""


class ParseError(MitiplanError):
    """Malformed input document (STIX bundle, CSV, catalog JSON)."""


class ValidationError(MitiplanError):
    """A value violates a domain invariant (bad ID, bad range, bad weight)."""


class CatalogError(MitiplanError):
    """Catalog-level integrity failure (dangling reference, duplicate entity)."""


class SchemaVersionError(CatalogError):
    """Persisted catalog carries an unsupported schema version."""


class McdmError(MitiplanError):
    """Scoring or ranking failure (zero cell under strict WPM, row mismatch)."""


class SimulationError(MitiplanError):
    """Campaign simulation failure (unknown technique, bad seed)."""
