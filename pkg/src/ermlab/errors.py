"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent arguments."""


class UnsupportedScenarioError(ValueError):
    """The requested quantity has no exact form for this scenario."""


class PolicyInapplicableError(ValueError):
    """A tie-break policy was applied to a sample it cannot act on."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``field`` names the offending key and ``line`` its line in the config
    file when known.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = ""
        if line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
