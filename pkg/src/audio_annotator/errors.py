"""Service-level error type shared by every module.

Each failure carries a stable machine-readable code; the HTTP layer maps
codes to status lines. Codes are part of the API contract, the human
detail text is not.
"""

from __future__ import annotations

# Validation
ERR_BOUNDS = "ERR_BOUNDS"
ERR_EMPTY_INTERVAL = "ERR_EMPTY_INTERVAL"
ERR_LABEL_SCOPE = "ERR_LABEL_SCOPE"
ERR_CARDINALITY = "ERR_CARDINALITY"
ERR_INVALID_ENCODING = "ERR_INVALID_ENCODING"
ERR_VALIDATION = "ERR_VALIDATION"

# Auth
ERR_WEAK_PASSWORD = "ERR_WEAK_PASSWORD"
ERR_BAD_CREDENTIALS = "ERR_BAD_CREDENTIALS"
ERR_UNAUTHENTICATED = "ERR_UNAUTHENTICATED"
ERR_FORBIDDEN = "ERR_FORBIDDEN"
ERR_LAST_ADMIN = "ERR_LAST_ADMIN"

# Store
ERR_CONFLICT = "ERR_CONFLICT"
ERR_NOT_FOUND = "ERR_NOT_FOUND"
ERR_IN_USE = "ERR_IN_USE"

# Ingestion
ERR_BAD_API_KEY = "ERR_BAD_API_KEY"
ERR_UNKNOWN_ASSIGNEE = "ERR_UNKNOWN_ASSIGNEE"
ERR_NOT_MEMBER = "ERR_NOT_MEMBER"
ERR_BAD_FORMAT = "ERR_BAD_FORMAT"
ERR_CORRUPT = "ERR_CORRUPT"
ERR_TOO_LARGE = "ERR_TOO_LARGE"
ERR_BAD_PREANNOTATION = "ERR_BAD_PREANNOTATION"

# Listing / media / QA
ERR_BAD_PAGE = "ERR_BAD_PAGE"
ERR_RANGE = "ERR_RANGE"
ERR_BAD_FRACTION = "ERR_BAD_FRACTION"
ERR_EMPTY_REFERENCE = "ERR_EMPTY_REFERENCE"


class ServiceError(Exception):
    """Raised by service operations; `code` is one of the ERR_* constants.

    `detail` is optional human-oriented context. Codes used on
    anti-enumeration paths (bad credentials, bad API key, media lookups)
    must never carry a detail, so equal failures serialize identically.
    """

    def __init__(self, code: str, detail: str | None = None):
        super().__init__(detail or code)
        self.code = code
        self.detail = detail

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ServiceError({self.code!r}, detail={self.detail!r})"
