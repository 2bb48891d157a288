"""Regenerate the sampler reference vectors shipped with the package.

    python scripts/make_reference_draws.py [--check]
"""

import argparse
import json
import sys

from hyperfid.sampling import REFERENCE_PATH, reference_document


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--check", action="store_true", help="compare instead of writing; exit 1 on mismatch")
    args = parser.parse_args()

    doc = reference_document()
    text = json.dumps(doc, indent=1) + "\n"
    if args.check:
        same = REFERENCE_PATH.read_text() == text
        print("reference draws match" if same else "reference draws DIFFER")
        return 0 if same else 1
    REFERENCE_PATH.write_text(text)
    print(f"wrote {REFERENCE_PATH}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
