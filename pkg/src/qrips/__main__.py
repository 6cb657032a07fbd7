import sys

from qrips.cli import main

if __name__ == "__main__":
    sys.exit(main())
