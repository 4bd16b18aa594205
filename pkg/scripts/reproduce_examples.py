#!/usr/bin/env python3
"""Walk the three worked scenarios over the partial CAD model end to end:
a valid full selection, a partial selection completed by propagation, and an
inconsistent selection with its conflict explanation.

Run from the repository root:  python3 scripts/reproduce_examples.py
"""

from pathlib import Path

from fmcheck import (
    Configuration,
    check_full_configuration,
    encode_model,
    format_formula,
    parse_model,
)
from fmcheck.propagate import propagate, reason_text

ROOT = Path(__file__).resolve().parent.parent
SELECTED_FULL = ("CAD", "v1", "v1.1", "v2", "v2.1", "v2.3", "v2.3.1", "v2.4", "v3", "v3.2")
SELECTED_PARTIAL = ("v1", "v2", "v2.1", "v2.3", "v2.3.1", "v2.4", "v3")
SELECTED_CLASHING = ("v1", "v1.2", "v2", "v2.3", "v2.3.1", "v3", "v3.1")


def banner(title):
    print()
    print(f"=== {title} " + "=" * max(0, 60 - len(title)))


def show_check(encoded, cfg):
    result = check_full_configuration(encoded, cfg)
    for check in result.checks:
        value = "T" if check.value else "F"
        print(f"  {check.conjunct.label}: {format_formula(check.conjunct.formula)} = {value}")
    print(f"  => {'valid product' if result.valid else 'invalid product'}")
    return result


def main():
    model = parse_model((ROOT / "models" / "cad_partial.fm").read_text())
    encoded = encode_model(model)

    banner("scenario 1: a full selection forms a valid product")
    print(f"  selected: {', '.join(SELECTED_FULL)}")
    full = Configuration.from_signs(
        selected=SELECTED_FULL,
        deselected=[f for f in model.feature_ids if f not in SELECTED_FULL])
    show_check(encoded, full)

    banner("scenario 2: propagation completes a partial selection")
    print(f"  selected: {', '.join(SELECTED_PARTIAL)}")
    result = propagate(encoded, Configuration.from_signs(selected=SELECTED_PARTIAL))
    for d in result.derivations:
        sign = "+" if d.value else "-"
        print(f"  forced {sign} {d.feature}  ({reason_text(d.via)})")
    completed = result.configuration.completed(model.feature_ids)
    show_check(encoded, completed)

    banner("scenario 3: an inconsistent selection is explained")
    print(f"  selected: {', '.join(SELECTED_CLASHING)}")
    result = propagate(encoded, Configuration.from_signs(selected=SELECTED_CLASHING))
    conflict = result.conflict
    print(f"  conflict on {conflict.conflicting_feature}:")
    for step in conflict.cause_chain:
        sign = "+" if step.value else "-"
        print(f"    {sign} {step.feature}  ({reason_text(step.via)})")


if __name__ == "__main__":
    main()
