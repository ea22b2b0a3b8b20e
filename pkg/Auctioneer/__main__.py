import sys

from .commands.Main import main

sys.exit(main())
