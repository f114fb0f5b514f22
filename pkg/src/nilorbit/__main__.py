import sys

from nilorbit.cli import main

sys.exit(main())
