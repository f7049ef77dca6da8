import os

# Global, mutable worker count configured by the CLI (defaults to 1 = serial)
GLOBAL_WORKERS = int(os.getenv("LSIRM_WORKERS", "1") or 1)

def set_workers(n: int | None):
    """Set the number of worker processes used for chains and replications."""
    global GLOBAL_WORKERS
    GLOBAL_WORKERS = max(1, int(n or 1))

def get_workers() -> int:
    return max(1, GLOBAL_WORKERS)
