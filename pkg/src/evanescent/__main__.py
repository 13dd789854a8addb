import sys

from evanescent.cli import main

sys.exit(main())
