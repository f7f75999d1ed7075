"""Allow ``python -m merp`` alongside the ``merp`` console script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
