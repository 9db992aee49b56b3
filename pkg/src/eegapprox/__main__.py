import sys

from eegapprox.cli import main

sys.exit(main())
