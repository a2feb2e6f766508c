"""crtrigのエントリーポイント"""

import sys

from crtrig.cli import main

if __name__ == "__main__":
    sys.exit(main())
