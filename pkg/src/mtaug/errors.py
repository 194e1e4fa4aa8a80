"""Exception types shared across the toolkit."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration: bad flag values, missing inputs."""


class DataError(ValueError):
    """Malformed input data: unparsable lines, length mismatches, out-of-range links."""
