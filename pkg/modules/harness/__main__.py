import sys

from modules.harness.cli import main

sys.exit(main())
