import sys

from cluster_connectivity.main import main

sys.exit(main())
