import sys

from daosim.cli import main

sys.exit(main())
