"""Module entrypoint for `python -m spectral_povm`."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
