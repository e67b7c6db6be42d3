from spantrellis.cli.main import main

raise SystemExit(main())
