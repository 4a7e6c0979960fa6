"""Exception hierarchy.

Every error carries a ``category`` string that the CLI turns into a
machine-readable error document and an exit code.
"""


class GowersLabError(Exception):
    category = "internal"
    exit_code = 1


class InputError(GowersLabError, ValueError):
    category = "input"
    exit_code = 2


class BudgetExceeded(GowersLabError):
    category = "budget"
    exit_code = 3


class InvariantViolation(GowersLabError):
    category = "invariant"
    exit_code = 4


class NoWitnessError(GowersLabError):
    category = "no_witness"
    exit_code = 5
