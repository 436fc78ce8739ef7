import sys

from sentifuse.cli import main

sys.exit(main())
