"""Print the acceptance table and exit nonzero if any criterion fails."""

import sys

from darkstate_lab.acceptance import run_all

if __name__ == "__main__":
    results = run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    sys.exit(1 if failed else 0)
