"""pdflow: pinpoint personal data and its processing in Java/JS/TS code."""

__version__ = "0.1.0"

from .patterns import Finding, FlowInstance, FlowShape, classify, render  # noqa: F401
from .rulepack import RulePack, SinkCategory, SourceCategory, load_rulepack  # noqa: F401
from .scanner import FindingsDocument, scan  # noqa: F401
