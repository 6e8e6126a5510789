class ConfigError(Exception):
    """Raised for unreadable or inconsistent scene and problem files."""
    pass

class ConfigFileNotFoundError(ConfigError):
    def __init__(self, config_file, message="Scene or problem file does not exist"):
        self.config_file = config_file
        self.message = f"{message}: {config_file}"
        super().__init__(self.message)

class ConfigValidationError(ConfigError):
    """
    Collects every bad field of a scene or problem before failing.

    Field names are dotted paths into the JSON document, e.g. ``material.regions[0].elements``.
    """
    def __init__(self, missing_fields=None, invalid_fields=None, message="Scene validation error"):
        self.missing_fields = list(missing_fields or [])
        self.invalid_fields = list(invalid_fields or [])
        parts = [f"{label} {', '.join(names)}" for label, names in
                 (("missing:", self.missing_fields), ("rejected:", self.invalid_fields)) if names]
        self.message = f"{message} ({'; '.join(parts) or 'no field details'})"
        super().__init__(self.message)

class ConfigParseError(ConfigError):
    """JSON syntax error, reported with the line and column the decoder stopped at."""
    def __init__(self, config_file, original_exception, message="Scene or problem file is not valid JSON"):
        self.config_file = config_file
        self.original_exception = original_exception
        self.line = getattr(original_exception, "lineno", None)
        self.column = getattr(original_exception, "colno", None)
        location = f", line {self.line} column {self.column}" if self.line is not None else ""
        self.message = f"{message} ({config_file}{location}): {original_exception}"
        super().__init__(self.message)

class UnknownGeneratorError(ConfigError):
    def __init__(self, name, available, message="Unknown scene generator"):
        self.name = name
        self.available = list(available)
        self.message = f"{message}: '{name}'. Available generators are: {', '.join(self.available)}"
        super().__init__(self.message)
