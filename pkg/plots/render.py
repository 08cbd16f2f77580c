#!/usr/bin/env python3
"""Render boxball figures; see boxball_plots.cli for flags."""

import sys

from boxball_plots.cli import main

if __name__ == "__main__":
    sys.exit(main())
