"""Android XML layout to HarmonyOS ArkUI translation."""

from .pipeline import RunConfig, RunReport, RunResult, run, translate

__version__ = "0.1.0"

__all__ = ["RunConfig", "RunReport", "RunResult", "__version__", "run", "translate"]
