import sys

from collabsim.cli import main

sys.exit(main())
