"""Exception hierarchy shared across the package."""


class PdflowError(Exception):
    """Base class for all pdflow errors."""


class ParseError(PdflowError):
    """A rule-pack or declared-categories file is malformed."""


class InvalidRegex(PdflowError):
    """A rule pattern failed to compile; message names the offending rule id."""


class DuplicateRuleId(PdflowError):
    """Two rules in one pack share an id."""


class UnsupportedLanguage(PdflowError):
    """A source file's language is not Java/JavaScript/TypeScript."""


class SchemaMismatch(PdflowError):
    """A findings document (or labels file) does not match the expected schema."""


class UnknownKey(PdflowError):
    """An unknown group-by or filter key was requested."""


class Unclassifiable(PdflowError):
    """A raw flow does not map to any of the eight flow patterns."""


class ConfigError(PdflowError):
    """Invalid CLI configuration (bad paths, bad flags)."""


class PortInUse(PdflowError):
    """The requested server port is already bound."""
