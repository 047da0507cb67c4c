import sys

from kaccess.cli import main

sys.exit(main())
