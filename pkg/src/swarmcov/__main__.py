import sys

from swarmcov.cli import main

sys.exit(main())
