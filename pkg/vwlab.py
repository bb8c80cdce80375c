#!/usr/bin/env python
#
# Very weak solution lab launcher.
#
# usage:
#   python vwlab.py validate scenarios/consistency_affine.ini
#   python vwlab.py run scenarios/dirac_existence.ini --jobs 4
#   python vwlab.py export <run dir or hash prefix> --which moderateness
#   python vwlab.py regimes

from vwlab.cli import _main

if __name__ == '__main__':
    _main()
