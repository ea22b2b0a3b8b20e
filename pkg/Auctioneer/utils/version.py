VERSION = '0.1.0'
"""Package version, echoed in every report."""
