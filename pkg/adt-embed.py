#!/usr/bin/env python3
"""Run the adtembed command-line harness: python adt-embed.py <command> ..."""

import sys

from adtembed.cli import main

if __name__ == "__main__":
    sys.exit(main())
