import sys

from almostperiods.cli import main

sys.exit(main())
