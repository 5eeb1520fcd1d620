"""Channel and solution files."""
