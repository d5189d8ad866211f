import sys

from dcrlab.cli import main

sys.exit(main())
