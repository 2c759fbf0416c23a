"""Command line runner, scenario registry and file formats."""

from .scenarios import SCENARIOS, Check, Report, ScenarioConfig, ScenarioError, run
from .serialize import AuditFailure, FormatError

__all__ = ["SCENARIOS", "AuditFailure", "Check", "FormatError", "Report", "ScenarioConfig", "ScenarioError", "run"]
