import sys

from urns.main import main


sys.exit(main())
