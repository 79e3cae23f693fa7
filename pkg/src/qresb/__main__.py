import sys

from qresb.cli import main

sys.exit(main())
