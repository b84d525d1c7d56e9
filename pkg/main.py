import sys

from sinr_coloring.cli import main

if __name__ == "__main__":
    sys.exit(main())
