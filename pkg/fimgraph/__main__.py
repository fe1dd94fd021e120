import sys

from fimgraph.cli import main

sys.exit(main())
