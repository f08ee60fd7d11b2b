"""Export to the common LP text layout (objective, Subject To, Bounds, General, Binary, End)."""

from __future__ import annotations

from typing import List

from .model import Model, ObjectiveSense, VarKind
from .modelfile import format_expr


def write_lp(model: Model) -> str:
    out: List[str] = ["\\ reifmilp export"]
    obj = model.objective
    out.append("Minimize" if obj.sense is ObjectiveSense.MINIMIZE else "Maximize")
    if obj.sense is ObjectiveSense.FEASIBILITY or not obj.terms:
        out.append(" obj:")
    else:
        out.append(f" obj: {format_expr(model, obj.terms)}")

    out.append("Subject To")
    for c in model.constraints:
        if c.terms:
            lhs = format_expr(model, c.terms)
        elif model.variables:
            # LP rows need at least one variable
            lhs = f"0 {model.variables[0].name}"
        else:
            out.append(f"\\ {c.label}: empty row {c.sense.value} {c.rhs}")
            continue
        out.append(f" {c.label}: {lhs} {c.sense.value} {c.rhs}")

    out.append("Bounds")
    for v in model.variables:
        out.append(f" {v.name} = {v.lo}" if v.lo == v.hi else f" {v.lo} <= {v.name} <= {v.hi}")

    out.append("General")
    out.extend(f" {v.name}" for v in model.variables if v.kind is VarKind.INTEGER)
    out.append("Binary")
    out.extend(f" {v.name}" for v in model.variables if v.kind is VarKind.BINARY)
    out.append("End")
    return "\n".join(out) + "\n"
