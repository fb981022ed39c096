import sys

from quasichaos.pipeline.cli import main

sys.exit(main())
