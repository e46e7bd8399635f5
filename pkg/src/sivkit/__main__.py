import sys

from sivkit.cli import main

sys.exit(main())
