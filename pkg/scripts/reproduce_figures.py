#!/usr/bin/env python3
"""Regenerate the normalized-spectrum panels: hyperbola and cubic-curve
graphs over F_127, F_251, F_601, F_1117 plus the two finite-monodromy
degenerate panels (F_625, F_1024)."""

import sys

from cayleysum.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce-figures"] + sys.argv[1:]))
