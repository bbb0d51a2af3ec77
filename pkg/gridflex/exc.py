# This file is part of gridflex.
#
# gridflex is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# gridflex is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with gridflex.  If not, see <http://www.gnu.org/licenses/>.

"""
Exceptions raised from within the library.

.. currentmodule:: gridflex.exc
"""
import enum
from typing import Any, Dict, List, Optional


class ErrorCode(enum.IntEnum):
    # case files
    CASE_PARSE = 10001
    CASE_SCHEMA = 10002
    CASE_INVALID = 10003
    UNKNOWN_FIXTURE = 10004

    # scenarios
    SCENARIO_INVALID = 20001
    UNKNOWN_DATA_CENTER = 20002
    POLICY_INVALID = 20003
    TOO_MANY_CLUSTERS = 20004

    # lp-core
    ITERATION_LIMIT = 30001
    NUMERICAL_BREAKDOWN = 30002
    LP_INVALID = 30003

    # dispatch
    DISPATCH_INFEASIBLE = 40001
    DISPATCH_UNBOUNDED = 40002
    CASE_MISMATCH = 40003

    # metrics
    EMPTY_BUS_SUBSET = 50001
    MISSING_RATE = 50002
    MISSING_HTP_FACTOR = 50003
    UNKNOWN_BASELINE = 50004

    # study
    CONFIG_INVALID = 60001
    SCENARIO_FAILED = 60002
    NO_PRIOR_RUN = 60003
    UNKNOWN_BUS_OR_INTERVAL = 60004

    UNKNOWN = 0


class GridflexError(Exception):
    """
    The base class for all gridflex exceptions.
    """

    #: The error code for this class of error.
    error_code: ErrorCode = ErrorCode.UNKNOWN

    def __init__(self, message: str, *, code: ErrorCode = None):
        super().__init__(message)
        self.error_message = message
        if code is not None:
            self.error_code = code

    def to_dict(self) -> Dict[str, Any]:
        """
        :return: A machine-readable representation of this error.
        """
        return {
            "error": self.error_code.name,
            "code": int(self.error_code),
            "message": self.error_message,
        }

    def __str__(self) -> str:
        return "{} ({}): {}".format(int(self.error_code), self.error_code.name, self.error_message)

    __repr__ = __str__


# Case files.
class CaseError(GridflexError):
    """
    Raised when a case cannot be loaded or used.
    """


class CaseParseError(CaseError):
    """
    Raised when a case file is not well-formed JSON.
    """

    error_code = ErrorCode.CASE_PARSE

    def __init__(self, path: str, message: str, *, line: int = None, column: int = None):
        #: The file that failed to parse.
        self.path = path
        self.line = line
        self.column = column
        location = f"{path}:{line}:{column}" if line is not None else path
        super().__init__(f"{location}: {message}")


class CaseSchemaError(CaseError):
    """
    Raised when a case document does not follow the case schema.

    :ivar pointer: The location of the offending value inside the document, e.g.
        ``$.buses[2].base_load``.
    """

    error_code = ErrorCode.CASE_SCHEMA

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")

    def to_dict(self) -> Dict[str, Any]:
        d = super().to_dict()
        d["pointer"] = self.pointer
        return d


class CaseValidationError(CaseError):
    """
    Raised by the loaders when a parsed case violates one or more type invariants.
    """

    error_code = ErrorCode.CASE_INVALID

    def __init__(self, violations: List[Any]):
        #: The list of :class:`.Violation` records.
        self.violations = violations
        first = violations[0] if violations else None
        super().__init__(f"{len(violations)} violation(s), first: {first}")

    def to_dict(self) -> Dict[str, Any]:
        d = super().to_dict()
        d["violations"] = [str(v) for v in self.violations]
        return d


class UnknownFixtureError(CaseError, KeyError):
    """
    Raised when a built-in fixture name is not known.
    """

    error_code = ErrorCode.UNKNOWN_FIXTURE


# Scenarios.
class ScenarioError(GridflexError, ValueError):
    """
    Raised when a scenario or load-split policy is inconsistent with its case.
    """

    error_code = ErrorCode.SCENARIO_INVALID


# lp-core.
class SolverError(GridflexError):
    """
    Raised when the simplex solver cannot finish. This is distinct from an infeasible or
    unbounded status, which are reported on the solution.
    """


class IterationLimitExceeded(SolverError):
    error_code = ErrorCode.ITERATION_LIMIT

    def __init__(self, iterations: int, phase: int):
        self.iterations = iterations
        self.phase = phase
        super().__init__(f"iteration limit of {iterations} reached in phase {phase}")


class InvalidProgram(SolverError, ValueError):
    """
    Raised when a :class:`.LinearProgram` breaks its invariants.
    """

    error_code = ErrorCode.LP_INVALID


class NumericalBreakdown(SolverError):
    """
    Raised when the basis stays singular after a refactorization retry.
    """

    error_code = ErrorCode.NUMERICAL_BREAKDOWN


# Dispatch.
class DispatchError(GridflexError):
    """
    Raised when a dispatch cannot be built or solved.
    """


class DispatchInfeasible(DispatchError):
    """
    Raised when the dispatch LP has no feasible point.

    :ivar family: The constraint family that could be identified as the cause, if any
        (for example ``energy`` or ``balance``).
    """

    error_code = ErrorCode.DISPATCH_INFEASIBLE

    def __init__(self, message: str, *, family: Optional[str] = None, rows: List[str] = None):
        self.family = family
        self.rows = rows or []
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        d = super().to_dict()
        d["family"] = self.family
        d["rows"] = list(self.rows)
        return d


class DispatchUnbounded(DispatchError):
    error_code = ErrorCode.DISPATCH_UNBOUNDED


# Metrics.
class MetricsError(GridflexError, ValueError):
    """
    Raised when a metric cannot be computed from its inputs.
    """


# Study.
class StudyError(GridflexError):
    """
    Raised by the study runner. When a scenario fails, ``scenario`` names it and
    ``__cause__`` holds the underlying error.
    """

    error_code = ErrorCode.SCENARIO_FAILED

    def __init__(self, message: str, *, scenario: str = None, code: ErrorCode = None):
        self.scenario = scenario
        super().__init__(message, code=code)

    def to_dict(self) -> Dict[str, Any]:
        d = super().to_dict()
        d["scenario"] = self.scenario
        cause = self.__cause__
        if isinstance(cause, GridflexError):
            d["cause"] = cause.to_dict()
        elif cause is not None:
            d["cause"] = {"error": type(cause).__name__, "message": str(cause)}

        return d
