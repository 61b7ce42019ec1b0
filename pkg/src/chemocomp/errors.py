"""Exception types raised across the package."""


class ChemocompError(Exception):
    pass


class ParameterError(ChemocompError, ValueError):
    def __init__(self, names, reason):
        self.names = tuple(names)
        self.name = self.names[0]
        super().__init__(f"{reason}: {', '.join(self.names)}")


class NonpositiveParameter(ParameterError):
    def __init__(self, names):
        super().__init__(names, "parameters must be strictly positive")


class NonfiniteParameter(ParameterError):
    def __init__(self, names):
        super().__init__(names, "parameters must be finite")


class InfeasibleDelta1(ChemocompError, ValueError):
    pass


class NonpositiveAtZero(ChemocompError, ArithmeticError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"g_{index}(0) = {value!r} is not positive")


class NoConvergence(ChemocompError, RuntimeError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")


class PositivityLoss(ChemocompError, RuntimeError):
    def __init__(self, species, cell, value):
        self.species = species
        self.cell = cell
        self.value = value
        super().__init__(f"{species} became negative ({value:.3e}) at cell {cell}")


class NonpositiveDensity(ChemocompError, ValueError):
    def __init__(self, species, cell):
        self.species = species
        self.cell = cell
        super().__init__(f"{species} is not strictly positive at cell {cell}")


class DegenerateWindow(ChemocompError, ValueError):
    pass


class InvalidInitialData(ChemocompError, ValueError):
    pass
