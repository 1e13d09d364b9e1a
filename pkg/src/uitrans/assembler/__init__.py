"""ArkUI page assembly, project emission and the well-formedness checker."""

from .checker import WellformednessError, check_wellformed, unit_outline
from .emit import (
    ArkUIPage,
    HarmonyProject,
    assemble_page,
    assemble_project,
    route_order,
    struct_source,
    write_project,
)

__all__ = [
    "ArkUIPage", "HarmonyProject", "WellformednessError", "assemble_page", "assemble_project",
    "check_wellformed", "route_order", "struct_source", "unit_outline", "write_project",
]
