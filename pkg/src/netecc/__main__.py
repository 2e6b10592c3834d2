from netecc.cli import main
import sys

sys.exit(main())
