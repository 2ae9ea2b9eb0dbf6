"""Exception hierarchy shared by the simulator modules"""

from typing import List, Optional, Sequence, Tuple


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class NotHermitianError(SimulationError):
    """Exception raised when a matrix expected to be Hermitian is not"""

    def __init__(self, asymmetry: float, tolerance: float):
        self.asymmetry = asymmetry
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not Hermitian: relative asymmetry {asymmetry:.3e} > {tolerance:.1e}"
        )


class RankDeficientError(SimulationError):
    """Exception raised when a matrix must have full column (or row) rank"""

    def __init__(self, shape: Tuple[int, ...], rank: int, what: str = "matrix"):
        self.shape = shape
        self.rank = rank
        self.what = what
        super().__init__(f"{what} of shape {shape} has insufficient rank {rank}")


class DimensionMismatchError(SimulationError):
    """Exception raised when a strategy does not fit the channel it is used with"""

    def __init__(self, expected: Tuple[int, ...], actual: Tuple[int, ...], what: str = "strategy"):
        self.expected = expected
        self.actual = actual
        self.what = what
        super().__init__(f"{what} has shape {actual}, expected {expected}")


class SingularDirectChannelError(SimulationError):
    """Exception raised when a direct channel H_qq is not square or is singular"""

    def __init__(self, user: int, condition_number: float):
        self.user = user
        self.condition_number = condition_number
        super().__init__(
            f"direct channel of user {user} is singular or not square "
            f"(condition number {condition_number:.3e})"
        )


class InfeasibleBudgetError(SimulationError):
    """Exception raised when per-entry caps cannot absorb a power budget"""

    def __init__(self, budget: float, capacity: float, user: Optional[int] = None):
        self.budget = budget
        self.capacity = capacity
        self.user = user
        who = f" for user {user}" if user is not None else ""
        super().__init__(f"budget {budget:.6g} exceeds total cap {capacity:.6g}{who}")


class ZeroChannelError(SimulationError):
    """Exception raised when a channel Gram matrix has no usable direction"""

    def __init__(self, largest_eigenvalue: float):
        self.largest_eigenvalue = largest_eigenvalue
        super().__init__(f"no transmit direction above rank tolerance (lambda_max={largest_eigenvalue:.3e})")


class DomainError(SimulationError):
    """Exception raised when an argument lies outside the function domain"""

    def __init__(self, name: str, value: object):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value!r} is outside the valid domain")


class BadParamsError(SimulationError):
    """Exception raised for invalid schedule or game parameters"""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class InfeasibleInitError(SimulationError):
    """Exception raised when the initial profile violates the game constraints"""

    def __init__(self, user: int, failed_checks: Sequence[str]):
        self.user = user
        self.failed_checks = list(failed_checks)
        super().__init__(
            f"initial strategy of user {user} is infeasible: {', '.join(self.failed_checks)}"
        )


class NonConvergenceError(SimulationError):
    """Exception raised when an experiment needs a converged run and did not get one"""

    def __init__(self, iterations: int, last_step: float):
        self.iterations = iterations
        self.last_step = last_step
        super().__init__(f"no convergence after {iterations} iterations (last step {last_step:.3e})")


class ScenarioParseError(SimulationError):
    """Exception raised when a scenario file cannot be turned into a game"""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))
