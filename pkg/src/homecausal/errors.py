"""Exception types shared across the toolkit."""


class HomecausalError(Exception):
    """Base class for all toolkit errors."""


class StructuralError(HomecausalError):
    """A graph or model references unknown variables, contains a cycle
    where none is allowed, or is otherwise malformed."""


class ConfigError(HomecausalError):
    """A scenario or configuration value is invalid."""


class PolicyError(HomecausalError):
    """An intervention was requested on a non-doable variable."""


class CapacityError(HomecausalError):
    """An exact computation would exceed the supported problem size."""


class NotPolytreeError(HomecausalError):
    """Message passing was asked to run on a structure whose undirected
    skeleton contains a cycle."""

    def __init__(self, msg: str = "structure is not a polytree; use enumerate_posterior"):
        super().__init__(msg)


class ZeroProbabilityEvidenceError(HomecausalError):
    """The supplied evidence has probability zero under the model."""


class EnvironmentFailure(HomecausalError):
    """The sampling environment failed to produce requested data."""


class ScenarioParseError(ConfigError):
    """A scenario document failed to parse; carries line-numbered diagnostics."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))
