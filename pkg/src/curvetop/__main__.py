import sys

from curvetop.cli import main

sys.exit(main())
