"""Rewrite the golden JSON reports: ``python3 tests/golden/regenerate.py``.

Run after an intentional change to the report format, then review the diff.
"""

import io
from pathlib import Path

from tfpvkit import FIXTURES
from tfpvkit.cli import run

HERE = Path(__file__).resolve().parent
FIXTURE_DIR = HERE.parents[1] / "fixtures"
COMMANDS = ("analyze", "tfpv", "ltc")


def render(name: str, command: str) -> str:
    out, err = io.StringIO(), io.StringIO()
    run([command, str(FIXTURE_DIR / f"{name}.crn"), "--json"], stdout=out, stderr=err)
    return out.getvalue()


def main() -> None:
    for name in FIXTURES:
        for command in COMMANDS:
            (HERE / f"{name}.{command}.json").write_text(render(name, command), encoding="utf-8")


if __name__ == "__main__":
    main()
