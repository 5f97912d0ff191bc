class ContractError(ValueError):
    """An input violates a documented precondition."""


class CertificationError(ValueError):
    def __init__(self, message, angle=None):
        super().__init__(message)
        self.angle = angle


class WeightDomainError(ValueError):
    """Carleman weights are singular at t = 0 and t = T."""


class SolverBreakdown(RuntimeError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(ValueError):
    pass
