"""Regenerate tests/golden/*.out from the current CLI (review the diff before committing)."""

from pathlib import Path

from valtree.acceptance import GOLDEN_COMMANDS, run_cli

OUT = Path(__file__).resolve().parents[1] / "tests" / "golden"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, argv in GOLDEN_COMMANDS:
        code, out = run_cli(argv)
        if code:
            raise SystemExit(f"{name}: exit code {code}")
        (OUT / f"{name}.out").write_bytes(out)
        print(f"wrote {name}.out ({len(out)} bytes)")


if __name__ == "__main__":
    main()
