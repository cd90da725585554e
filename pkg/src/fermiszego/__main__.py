import sys

from fermiszego.cli import main

sys.exit(main())
