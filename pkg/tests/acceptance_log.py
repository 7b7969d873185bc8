"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

RESULTS: dict = {}


def record(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}" + (f" ({detail})" if detail else "")
    RESULTS[number] = line
    print(line)
    return line


def summary_lines() -> list:
    return [RESULTS[k] for k in sorted(RESULTS)]
