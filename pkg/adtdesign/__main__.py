import sys

from adtdesign.cli import main

sys.exit(main())
