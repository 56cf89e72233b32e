"""A small BER sweep, run in-process.

Uses a reduced error target so it finishes in seconds. For full runs use
``precode-lab simulate``.
"""

import sys

from precode_lab.config import SystemConfig
from precode_lab.errors import PrecodeLabError
from precode_lab.sim import sweep

K = int(sys.argv[1]) if len(sys.argv) > 1 else 16
cfg = SystemConfig(K=K, ebn0_grid_db=(0.0, 8.0, 16.0, 24.0), min_bit_errors=100, max_blocks=50)
try:
    records = sweep(cfg, workers=2)
except PrecodeLabError as exc:  # e.g. K=32 makes THP degenerate at this geometry
    sys.exit(f"sweep stopped: {exc}")

print(f"N={cfg.N} K={cfg.K} G={cfg.G} {cfg.M}-QAM")
for rec in records:
    print(f"  {rec.scheme:<8}{rec.ebn0_db:>5.0f} dB  BER {rec.ber:.4f}  ({rec.blocks_used} blocks)")
