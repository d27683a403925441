from .constants import (
    GRADEDKIT_NAMESPACE,
    GRADEDKIT_SERVICE_NAME,
    GRADEDKIT_REPORT_SCHEMA,
    GRADEDKIT_MIN_DEGREE,
    GRADEDKIT_MAX_DEGREE,
    GRADEDKIT_MAX_ARITY,
)
