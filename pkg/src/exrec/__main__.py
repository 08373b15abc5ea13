from exrec.cli import main

raise SystemExit(main())
