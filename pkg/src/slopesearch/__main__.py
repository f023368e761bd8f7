import sys

from slopesearch.cli import main

sys.exit(main())
