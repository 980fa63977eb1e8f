import sys

from lcmst.main import main

sys.exit(main())
