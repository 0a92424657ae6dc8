"""Property suites for the ``check`` command."""

from almostperiods.suites.base import PropertySuite, SuiteResult, get_suite, suite_names

# Importing suite modules triggers @register_suite decorators.
import almostperiods.suites.algebra  # noqa: F401
import almostperiods.suites.cohomology  # noqa: F401
import almostperiods.suites.determinism  # noqa: F401
import almostperiods.suites.periods  # noqa: F401

__all__ = [
    "PropertySuite",
    "SuiteResult",
    "get_suite",
    "suite_names",
]
