"""Rewrite the golden files under tests/golden from the current code.

Run only after an intentional format change:  python3 scripts/regen_golden.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from golden_cases import CASES  # noqa: E402


def main() -> None:
    out = ROOT / "tests" / "golden"
    out.mkdir(exist_ok=True)
    for name, make in sorted(CASES.items()):
        (out / name).write_bytes(make())
        print(f"wrote {name}")


if __name__ == "__main__":
    main()
