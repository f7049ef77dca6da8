"""Chain files.

Chain CSV: one row per stored draw; columns theta_1..theta_N, beta_1..beta_P,
gamma, sigma_theta_sq, z_<i>_<k>, w_<j>_<k> (1-based), floats written with 17
significant digits so that reading back is exact. A JSON sidecar with the same
stem records the sampler config, hyperparameters, seed, chain index,
acceptance rates, wall-clock seconds and dimensions. Only the CSV is
byte-stable across reruns; the sidecar timing is not.

BIRT draws use birt_x_<i>_<k>, birt_disc_<j>_<k>, birt_diff_<j>.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
import numpy as np
import pandas as pd
from core.errors import DataError
from core.schema import Hyperparams, VoteMatrix
from birt.model import BirtFit, BirtState, align_birt_draws
from sampler.schema import ChainDraws, SamplerConfig

FLOAT_FORMAT = "%.17g"

def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")

def _grid(prefix: str, rows: int, k: int) -> List[str]:
    return [f"{prefix}_{i + 1}_{d + 1}" for i in range(rows) for d in range(k)]

def chain_columns(n: int, p: int, k: int) -> List[str]:
    return (
        [f"theta_{i + 1}" for i in range(n)]
        + [f"beta_{j + 1}" for j in range(p)]
        + ["gamma", "sigma_theta_sq"]
        + _grid("z", n, k)
        + _grid("w", p, k)
    )

def _write(frame: pd.DataFrame, path: Path, meta: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path

def _read(path) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no chain file at {path}")
    side = sidecar_path(path)
    if not side.exists():
        raise DataError(f"chain file {path} has no sidecar {side.name}")
    try:
        frame = pd.read_csv(path, dtype=float, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e
    return frame, json.loads(side.read_text())

def write_chain(
    chain: ChainDraws,
    path,
    hyper: Optional[Hyperparams] = None,
    data: Optional[VoteMatrix] = None,
) -> Path:
    n, p, k = chain.dims
    d = len(chain)
    values = np.hstack([
        chain.theta,
        chain.beta,
        chain.gamma[:, None],
        chain.sigma_theta_sq[:, None],
        chain.z.reshape(d, n * k),
        chain.w.reshape(d, p * k),
    ])
    meta = {
        "kind": "lsirm",
        "dims": {"n_legislators": n, "n_bills": p, "k": k, "n_draws": d},
        "seed": chain.seed,
        "chain": chain.chain,
        "sampler": chain.config_echo.model_dump(mode="json"),
        "hyperparams": hyper.model_dump(mode="json") if hyper else None,
        "acceptance_rates": chain.acceptance_rates,
        "final_steps": chain.final_steps,
        "elapsed_seconds": chain.elapsed_seconds,
    }
    if data is not None:
        meta["legislator_ids"] = data.legislator_ids
        meta["bill_ids"] = data.bill_ids
    return _write(pd.DataFrame(values, columns=chain_columns(n, p, k)), Path(path), meta)

def read_chain(path) -> Tuple[ChainDraws, Dict[str, Any]]:
    """ChainDraws plus the sidecar dictionary."""
    frame, meta = _read(path)
    if meta.get("kind") != "lsirm":
        raise DataError(f"{path} is not a latent space chain (kind={meta.get('kind')})")
    dims = meta["dims"]
    n, p, k = dims["n_legislators"], dims["n_bills"], dims["k"]
    expected = chain_columns(n, p, k)
    if list(frame.columns) != expected:
        raise DataError(f"{path} columns do not match the sidecar dimensions {n}x{p}x{k}")
    d = len(frame)
    chain = ChainDraws(
        theta=frame[expected[:n]].to_numpy(),
        beta=frame[expected[n:n + p]].to_numpy(),
        gamma=frame["gamma"].to_numpy(),
        sigma_theta_sq=frame["sigma_theta_sq"].to_numpy(),
        z=frame[_grid("z", n, k)].to_numpy().reshape(d, n, k),
        w=frame[_grid("w", p, k)].to_numpy().reshape(d, p, k),
        acceptance_rates=meta.get("acceptance_rates") or {},
        final_steps=meta.get("final_steps") or {},
        seed=meta.get("seed", 0),
        chain=meta.get("chain", 0),
        config_echo=SamplerConfig.model_validate(meta["sampler"]),
        elapsed_seconds=meta.get("elapsed_seconds", 0.0),
    )
    return chain, meta

def birt_columns(n: int, p: int, dims: int) -> List[str]:
    return _grid("birt_x", n, dims) + _grid("birt_disc", p, dims) + [f"birt_diff_{j + 1}" for j in range(p)]

def write_birt(fit: BirtFit, path, data: Optional[VoteMatrix] = None, prior_sd: float = 1.0) -> Path:
    d, n, dims = fit.x.shape
    p = fit.difficulty.shape[1]
    values = np.hstack([fit.x.reshape(d, n * dims), fit.discrimination.reshape(d, p * dims), fit.difficulty])
    meta = {
        "kind": "birt",
        "dims": {"n_legislators": n, "n_bills": p, "k": dims, "n_draws": d},
        "seed": fit.seed,
        "chain": fit.chain,
        "prior_sd": prior_sd,
        "sampler": fit.config_echo.model_dump(mode="json"),
        "acceptance_rates": fit.acceptance_rates,
        "elapsed_seconds": fit.elapsed_seconds,
    }
    if data is not None:
        meta["legislator_ids"] = data.legislator_ids
        meta["bill_ids"] = data.bill_ids
    return _write(pd.DataFrame(values, columns=birt_columns(n, p, dims)), Path(path), meta)

def read_birt(path) -> Tuple[BirtFit, Dict[str, Any]]:
    """Raw BIRT draws, re-aligned on load."""
    frame, meta = _read(path)
    if meta.get("kind") != "birt":
        raise DataError(f"{path} is not a BIRT chain (kind={meta.get('kind')})")
    dims = meta["dims"]
    n, p, k = dims["n_legislators"], dims["n_bills"], dims["k"]
    if list(frame.columns) != birt_columns(n, p, k):
        raise DataError(f"{path} columns do not match the sidecar dimensions {n}x{p}x{k}")
    d = len(frame)
    x = frame[_grid("birt_x", n, k)].to_numpy().reshape(d, n, k)
    disc = frame[_grid("birt_disc", p, k)].to_numpy().reshape(d, p, k)
    diff = frame[[f"birt_diff_{j + 1}" for j in range(p)]].to_numpy()
    ax, ad, aa = align_birt_draws(x, disc, diff)
    fit = BirtFit(
        x=x,
        discrimination=disc,
        difficulty=diff,
        aligned_x=ax,
        aligned_discrimination=ad,
        aligned_difficulty=aa,
        mean_state=BirtState(x=ax.mean(axis=0), discrimination=ad.mean(axis=0), difficulty=aa.mean(axis=0)),
        acceptance_rates=meta.get("acceptance_rates") or {},
        seed=meta.get("seed", 0),
        chain=meta.get("chain", 0),
        config_echo=SamplerConfig.model_validate(meta["sampler"]),
        elapsed_seconds=meta.get("elapsed_seconds", 0.0),
    )
    return fit, meta

def read_chain_kind(path) -> str:
    side = sidecar_path(path)
    if not side.exists():
        raise DataError(f"chain file {path} has no sidecar {side.name}")
    return json.loads(side.read_text()).get("kind", "lsirm")

def write_aligned_csv(table: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path

def read_aligned_csv(path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no aligned coordinates at {path}")
    table = pd.read_csv(path, dtype={"node_id": str, "node_type": str}, float_precision="round_trip")
    if list(table.columns[:2]) != ["node_id", "node_type"]:
        raise DataError(f"{path} does not start with node_id,node_type")
    return table
