"""Shared recorder for the acceptance-criteria summary lines."""

LINES = []


def record(name, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    line = f"CRITERION {name}: {status}"
    if detail:
        line += f" - {detail}"
    LINES.append(line)
    print(line, flush=True)
    return passed
