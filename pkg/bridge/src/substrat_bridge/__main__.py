import sys

from substrat_bridge.server import main

sys.exit(main())
