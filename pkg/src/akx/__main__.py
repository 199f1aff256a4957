from akx.cli import main
import sys
sys.exit(main())
