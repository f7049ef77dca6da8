# Ensure multiprocessing uses 'fork' on macOS to avoid named semaphore tracking.
# Must be set early, before libraries import multiprocessing.synchronize.
try:
    import multiprocessing as _mp
    _mp.set_start_method("fork", force=False)
    _mp.freeze_support()
except Exception:
    pass

import sys
from ui.cli import main

if __name__ == "__main__":
    sys.exit(main())
