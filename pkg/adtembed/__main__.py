import sys

from adtembed.cli import main

sys.exit(main())
