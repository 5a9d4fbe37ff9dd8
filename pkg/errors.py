from __future__ import annotations

# CLI exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_SOLVER_CAPACITY = 3
EXIT_INVARIANT = 4


class PackLabError(Exception):
    """Root of every error raised by the services."""

    exit_code = EXIT_FAILURE


# --- distributions / instances ---


class InvalidDistribution(PackLabError, ValueError):
    pass


class NonPositiveProbability(InvalidDistribution):
    pass


class ProbabilitySumNotOne(InvalidDistribution):
    pass


class NegativeValue(InvalidDistribution):
    pass


class NonPositiveRate(InvalidDistribution):
    pass


class UsedExceedsCapacity(PackLabError, ValueError):
    pass


class InvalidInstance(PackLabError, ValueError):
    pass


# --- engine ---


class InvalidMove(PackLabError, ValueError):
    pass


class UseOfBrokenBin(InvalidMove):
    pass


class UseOfNonexistentBin(InvalidMove):
    pass


# --- solver capacity (exit 3) ---


class SolverCapacityError(PackLabError):
    exit_code = EXIT_SOLVER_CAPACITY


class StateSpaceTooLarge(SolverCapacityError):
    pass


class TreeTooLarge(SolverCapacityError):
    pass


class UsageSetTooLarge(SolverCapacityError):
    pass


class InstanceTooLarge(SolverCapacityError):
    pass


class TooManyVariables(SolverCapacityError):
    pass


# --- bad inputs to a service ---


class InputError(PackLabError, ValueError):
    pass


class NonDiscreteItem(InputError):
    pass


class InconsistentTree(InputError):
    pass


class UnknownName(InputError):
    pass


class InvalidParams(InputError):
    pass


class NotWidth2(InputError):
    pass


class NotSymmetric(InputError):
    pass


class OccurrenceBound(InputError):
    pass


class CountOutOfRange(InputError):
    pass


class ParamsMismatch(InputError):
    pass


class InvalidPolicySpec(InputError):
    pass


# --- invariant violations (exit 4) ---


class InvariantViolation(PackLabError):
    exit_code = EXIT_INVARIANT


class DeviationLogicBreach(InvariantViolation):
    # a tracked copy bin broke while its discretized source bin did not
    pass


class BudgetBoundViolation(InvariantViolation):
    pass


class BoundCheckFailed(InvariantViolation):
    pass
