import sys

from ctlsearch.cli import main

sys.exit(main())
