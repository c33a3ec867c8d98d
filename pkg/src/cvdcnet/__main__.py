import sys

from .cli_scan import main

if __name__ == "__main__":
    sys.exit(main())
