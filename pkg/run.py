#!/usr/bin/env python3
"""
Run script for the quantum Hawk-Dove analysis system
"""

import sys
from qhd_system.main import main

if __name__ == "__main__":
    sys.exit(main())
