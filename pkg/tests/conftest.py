import sys
from pathlib import Path

# Make the oracle helpers importable from the test directory.
sys.path.insert(0, str(Path(__file__).parent))
