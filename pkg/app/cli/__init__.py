"""
CLI Package - Komut satırı arayüzü
"""

from app.cli.commands import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, build_parser, main

__all__ = ["EXIT_DOMAIN", "EXIT_OK", "EXIT_USAGE", "build_parser", "main"]
