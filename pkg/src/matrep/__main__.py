import sys

from matrep.cli import main

sys.exit(main())
