#!/usr/bin/env python3
"""
Cone Spectra - Komut satırı giriş noktası
"""
import sys

from app.cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
