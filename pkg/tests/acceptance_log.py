"""Collects one verdict line per acceptance criterion."""

LINES: dict = {}


def record(number: int, ok: bool, title: str, detail: str) -> bool:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    LINES[number] = line
    print(line)
    return ok
