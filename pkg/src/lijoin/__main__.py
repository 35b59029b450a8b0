from lijoin.cli import main

raise SystemExit(main())
