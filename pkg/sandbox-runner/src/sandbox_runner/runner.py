"""Run one program in a restricted child interpreter, JSON in, JSON out.

Protocol: a single JSON request document on stdin,

    {"program": str, "timeout_s": number}

and a single JSON response document on stdout,

    {"status": "ok"|"exception"|"timeout"|"empty_output",
     "stdout": str, "value": str|null, "error": str|null}

The process exits 0 whenever a well-formed response was emitted; a failing
program is data, not an exit status.  Each request runs in a fresh
interpreter (``python -I``) with a private temporary working directory and
a wall-clock limit.  Imports are restricted to a small allow-list checked
by AST inspection; this blocks accidental network and filesystem modules
but is not a defense against adversarial programs.
"""

from __future__ import annotations

import ast
import json
import subprocess
import sys
import tempfile
from pathlib import Path

DEFAULT_TIMEOUT_S = 10.0

# Guess recorded as configuration: the symbolic library is allowed when
# installed, and programs that import something absent fail as exceptions.
ALLOWED_IMPORTS = frozenset({"math", "fractions", "itertools", "sympy"})

STDERR_TAIL = 1000


def validate_imports(program: str) -> list[str]:
    """Names of top-level modules the program imports outside the allow-list.

    A syntactically invalid program returns no violations; the child
    interpreter will report the SyntaxError as a normal exception.
    """
    try:
        tree = ast.parse(program)
    except SyntaxError:
        return []
    violations = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            names = [alias.name.split(".")[0] for alias in node.names]
        elif isinstance(node, ast.ImportFrom):
            names = [node.module.split(".")[0]] if node.module else []
        else:
            continue
        for name in names:
            if name not in ALLOWED_IMPORTS and name not in violations:
                violations.append(name)
    return violations


def _response(status: str, stdout: str = "", value: str | None = None, error: str | None = None) -> dict:
    return {"status": status, "stdout": stdout, "value": value, "error": error}


def execute(request: dict) -> dict:
    """Run one program and classify the result.

    status=ok iff the program exits 0 with non-whitespace stdout; the value
    is the last non-empty stdout line.
    """
    program = request.get("program")
    if not isinstance(program, str) or not program.strip():
        return _response("exception", error="request carries no program")
    try:
        timeout_s = float(request.get("timeout_s", DEFAULT_TIMEOUT_S))
    except (TypeError, ValueError):
        return _response("exception", error="timeout_s is not a number")
    if timeout_s <= 0:
        return _response("exception", error="timeout_s must be positive")

    violations = validate_imports(program)
    if violations:
        allowed = ", ".join(sorted(ALLOWED_IMPORTS))
        return _response(
            "exception",
            error=f"disallowed import(s): {', '.join(violations)} (allowed: {allowed})",
        )

    with tempfile.TemporaryDirectory(prefix="potbox-") as workdir:
        program_path = Path(workdir) / "program.py"
        program_path.write_text(program, encoding="utf-8")
        proc = subprocess.Popen(
            [sys.executable, "-I", str(program_path)],
            cwd=workdir,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            stdin=subprocess.DEVNULL,
            text=True,
            env={"PATH": "/usr/bin:/bin"},
        )
        try:
            stdout, stderr = proc.communicate(timeout=timeout_s)
        except subprocess.TimeoutExpired:
            proc.kill()
            stdout, _ = proc.communicate()
            return _response("timeout", stdout=stdout or "",
                             error=f"wall clock limit of {timeout_s}s exceeded")

    if proc.returncode != 0:
        return _response("exception", stdout=stdout, error=stderr[-STDERR_TAIL:].strip())
    lines = [line for line in stdout.split("\n") if line.strip()]
    if not lines:
        return _response("empty_output", stdout=stdout)
    return _response("ok", stdout=stdout, value=lines[-1].strip())


def main() -> int:
    raw = sys.stdin.read()
    try:
        request = json.loads(raw)
        if not isinstance(request, dict):
            raise ValueError("request must be a JSON object")
    except ValueError as exc:
        response = _response("exception", error=f"malformed request: {exc}")
    else:
        response = execute(request)
    sys.stdout.write(json.dumps(response, ensure_ascii=False))
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
