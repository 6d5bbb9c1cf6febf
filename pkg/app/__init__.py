"""spanforge command-line application."""
