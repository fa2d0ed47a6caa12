"""Pass/fail lines collected by the acceptance tests and printed at session end."""
LINES = []


def record(number, title, ok, detail=""):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    LINES.append(line)
    print(line)
    return ok
