import sys

from sweepdyn.cli import main

sys.exit(main())
