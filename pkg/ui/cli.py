"""Command line surface.

Exit status: 0 success, 1 usage or configuration error, 2 data error.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional
import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError
from agent.graph import replicate
from agent.schema import ReplicationJob
from birt.model import fit_birt
from core.errors import ConfigError, ContractViolation, DataError
from core.schema import Hyperparams
from identify.align import aligned_table, summarize
from metrics.audit import metric_audit
from metrics.geometry import bill_anchors
from metrics.scores import build_report
from sampler.gibbs import run_chains
from sampler.schema import SamplerConfig
from simgen.scenarios import generate
from simgen.schema import ScenarioSpec
from utils.chain_io import read_aligned_csv, read_birt, read_chain, read_chain_kind, write_aligned_csv, write_birt, write_chain
from utils.config import set_workers
from utils.logs import get_logger, set_log_level
from utils.rng import generator_for
from utils.votes_io import (
    IngestConfig,
    filter_lopsided,
    holdout_mask,
    ingest_votes,
    mask_cells,
    read_holdout,
    read_vote_matrix,
    write_holdout,
    write_vote_matrix,
)
from .plot import write_plot_data

logger = get_logger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2

class Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")

# Helpers
def _load(cls, path: Optional[str], overrides: Dict) -> BaseModel:
    """JSON file (if any) first, then non-None flag overrides, validated together."""
    base = {}
    if path:
        try:
            base = json.loads(Path(path).read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"no config file at {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}") from e
    base.update({k: v for k, v in overrides.items() if v is not None})
    return cls.model_validate(base)

def _parse_params(pairs: List[str]) -> Dict:
    params = {}
    for pair in pairs or []:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got '{pair}'")
        try:
            params[key.strip().replace("-", "_")] = json.loads(raw)
        except json.JSONDecodeError:
            params[key.strip().replace("-", "_")] = raw
    return params

def _scenario(args) -> ScenarioSpec:
    if args.spec:
        spec = _load(ScenarioSpec, args.spec, {})
        return spec.model_copy(update={"seed": args.seed}) if args.seed is not None else spec
    if not args.kind:
        raise ConfigError("either --kind or --spec is required")
    params = {
        "k": args.k, "p": args.p, "q": args.q,
        "independent_share": args.independent_share, "p_indep": args.p_indep,
        "partisan_share": args.partisan_share, "coalition": args.coalition,
        "n_bills": args.n_bills,
    }
    params = {k: v for k, v in params.items() if v is not None}
    params.update(_parse_params(args.param))
    return ScenarioSpec(kind=args.kind, params=params, seed=args.seed or 0)

def _sampler(args) -> SamplerConfig:
    return _load(SamplerConfig, args.sampler, {
        "n_iterations": args.iterations,
        "burn_in": args.burn_in,
        "thin": args.thin,
        "n_chains": getattr(args, "chains", None),
        "init": getattr(args, "init", None),
        "seed": args.seed,
    })

def _hyper(args) -> Hyperparams:
    return _load(Hyperparams, getattr(args, "hyper", None), {"k": getattr(args, "dims", None)})

def _chain_path(out: Path, chain: int) -> Path:
    return out if chain == 0 else out.with_name(f"{out.stem}_chain{chain}{out.suffix}")

def _write_json(obj, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")

# Commands
def cmd_simulate(args) -> int:
    spec = _scenario(args)
    data = generate(spec)
    path = write_vote_matrix(data, args.out)
    print(f"✅ {spec.kind}: {data.n_legislators}x{data.n_bills} written to {path}")
    return 0

def cmd_ingest(args) -> int:
    config = _load(IngestConfig, args.config, {
        "lopsided_threshold": args.threshold,
        "legislator_column": args.legislator_column,
        "bill_column": args.bill_column,
        "code_column": args.code_column,
    })
    data = filter_lopsided(ingest_votes(args.votes, config), config.lopsided_threshold)
    path = write_vote_matrix(data, args.out)
    print(f"✅ {data.n_legislators} legislators x {data.n_bills} roll calls written to {path}")
    return 0

def _training_data(args, data, config: SamplerConfig, out: Path):
    if not args.holdout_frac:
        return data, None
    mask = holdout_mask(data, args.holdout_frac, config.seed)
    holdout = write_holdout(data, mask, out.with_suffix(".holdout.csv"))
    print(f"   held out {int(mask.sum())} cells to {holdout}")
    return mask_cells(data, mask), holdout

def cmd_fit(args) -> int:
    data = read_vote_matrix(args.data)
    hyper, config = _hyper(args), _sampler(args)
    out = Path(args.out)
    train, _ = _training_data(args, data, config, out)
    for chain in run_chains(train, hyper, config):
        path = write_chain(chain, _chain_path(out, chain.chain), hyper=hyper, data=data)
        print(f"✅ chain {chain.chain}: {len(chain)} draws written to {path} (acceptance {_rates(chain.acceptance_rates)})")
    return 0

def cmd_fit_birt(args) -> int:
    data = read_vote_matrix(args.data)
    config = _sampler(args)
    out = Path(args.out)
    train, _ = _training_data(args, data, config, out)
    fit = fit_birt(train, config, prior_sd=args.prior_sd, dims=args.dims or 2)
    path = write_birt(fit, out, data=data, prior_sd=args.prior_sd)
    print(f"✅ BIRT: {len(fit)} draws written to {path} (acceptance {_rates(fit.acceptance_rates)})")
    return 0

def _rates(rates: Dict[str, float]) -> str:
    return ", ".join(f"{b}={r:.2f}" for b, r in rates.items())

def _ids(meta: Dict, data) -> tuple:
    if data is not None:
        return data.legislator_ids, data.bill_ids
    n, p = meta["dims"]["n_legislators"], meta["dims"]["n_bills"]
    return (
        meta.get("legislator_ids") or [f"leg{i + 1}" for i in range(n)],
        meta.get("bill_ids") or [f"bill{j + 1}" for j in range(p)],
    )

def cmd_align(args) -> int:
    data = read_vote_matrix(args.data) if args.data else None
    if read_chain_kind(args.chain) == "birt":
        fit, meta = read_birt(args.chain)
        legislators, bills = _ids(meta, data)
        x, disc = fit.aligned_x, fit.aligned_discrimination
        coords = np.vstack([x.mean(axis=0), disc.mean(axis=0)])
        sds = np.vstack([x.std(axis=0, ddof=1), disc.std(axis=0, ddof=1)])
        table = pd.DataFrame({
            "node_id": list(legislators) + list(bills),
            "node_type": ["legislator"] * len(legislators) + ["bill"] * len(bills),
        })
        for d in range(coords.shape[1]):
            table[f"dim_{d + 1}"] = coords[:, d]
        for d in range(coords.shape[1]):
            table[f"sd_{d + 1}"] = sds[:, d]
    else:
        chain, meta = read_chain(args.chain)
        legislators, bills = _ids(meta, data)
        table = aligned_table(summarize(chain, reference_index=args.reference_index), legislators, bills)
    path = write_aligned_csv(table, args.out)
    print(f"✅ aligned coordinates written to {path}")
    return 0

def cmd_metrics(args) -> int:
    data = read_vote_matrix(args.data)
    mask = None
    if args.holdout:
        mask, data = read_holdout(args.holdout, data)
    kind = read_chain_kind(args.chain[0])
    chains = None
    if kind == "birt":
        fitted, _ = read_birt(args.chain[0])
        draws = fitted
    else:
        chains = [read_chain(p)[0] for p in args.chain]
        fitted, draws = summarize(chains[0]), chains[0]
    report = build_report(
        fitted, data,
        label_key=args.labels,
        chains=chains,
        estimator=args.estimator,
        draws=draws,
        mask=mask,
        audit_triples=args.n_triples,
        seed=args.seed or 0,
        method=kind,
    )
    out = Path(args.out)
    _write_json(report.model_dump(mode="json", exclude={"silhouette_per_point"}), out)
    if report.silhouette_per_point:
        pd.DataFrame({
            "legislator_id": data.legislator_ids,
            "label": data.labels[args.labels],
            "silhouette": report.silhouette_per_point,
        }).to_csv(out.with_suffix(".silhouette.csv"), index=False, float_format="%.17g", lineterminator="\n")
    if chains:
        bill_anchors(fitted.mean_state["w"], data, top_n=args.top_bills).to_csv(
            out.with_suffix(".anchors.csv"), index=False, float_format="%.17g", lineterminator="\n"
        )
    print(f"✅ {kind}: accuracy {report.accuracy:.3f}, APRE {report.apre if report.apre is not None else float('nan'):.3f}"
          + (f", silhouette {report.silhouette_mean:.3f}" if report.silhouette_mean is not None else ""))
    return 0

def cmd_audit(args) -> int:
    forms = [args.form] if args.form != "all" else ["euclidean", "quadratic", "gaussian_utility"]
    results = []
    for i, form in enumerate(forms):
        res = metric_audit(form, args.n_triples, generator_for(args.seed or 0, "audit", iteration=i))
        results.append(res.model_dump(mode="json"))
        share = f"{res.same_sign_share:.3f}" if res.same_sign_share is not None else "-"
        print(f"{form:>17}: {res.violations:>7} violations ({res.witness_violations} witnesses), same-sign share {share}")
    if args.out:
        _write_json(results, Path(args.out))
    return 0

def cmd_replicate(args) -> int:
    seeds = args.seed_list or list(range(args.seed or 0, (args.seed or 0) + args.seeds))
    spec = _scenario(args)
    job = ReplicationJob(
        scenario=spec,
        seeds=seeds,
        sampler=_sampler(args),
        hyper=_hyper(args),
        include_birt=not args.no_birt,
        label_key=args.labels,
    )
    table = replicate(job)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out, index=False, float_format="%.17g", lineterminator="\n")
    _write_json(job.model_dump(mode="json"), out.with_suffix(".json"))
    for method, rows in table.groupby("method", sort=True):
        gm = rows["gamma_mean"].dropna()
        gamma = f", gamma {gm.mean():.3f} ({gm.std(ddof=1) if len(gm) > 1 else 0.0:.3f})" if len(gm) else ""
        print(f"✅ {method}: {len(rows)} rows, silhouette {rows['silhouette_mean'].mean():.3f}{gamma}")
    return 0

def cmd_plot(args) -> int:
    data = read_vote_matrix(args.data) if args.data else None
    svg, csv = write_plot_data(read_aligned_csv(args.aligned), args.out, data=data, label_key=args.labels, title=args.title or "")
    print(f"✅ scatter written to {svg}, tidy table to {csv}")
    return 0

# Parser
def _scenario_flags(p: argparse.ArgumentParser):
    p.add_argument("--kind", help="cohesion-gradient | cluster-recovery | agenda-sweep | noise-sweep | cross-party | four-coalition-demo")
    p.add_argument("--spec", help="ScenarioSpec JSON file")
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--independent-share", type=float)
    p.add_argument("--p-indep", type=float)
    p.add_argument("--partisan-share", type=float)
    p.add_argument("--coalition", choices=["both", "majority_consensus", "ends_against_middle"])
    p.add_argument("--n-bills", type=int)
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="any other scenario parameter")

def _sampler_flags(p: argparse.ArgumentParser, chains: bool = True):
    p.add_argument("--sampler", help="SamplerConfig JSON file")
    p.add_argument("--iterations", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--thin", type=int)
    if chains:
        p.add_argument("--chains", type=int)
        p.add_argument("--init", choices=["random", "pca"])

def build_parser() -> argparse.ArgumentParser:
    common = Parser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for every random draw of the command")
    common.add_argument("--workers", type=int, help="worker processes (default LSIRM_WORKERS or 1)")
    common.add_argument("--log-level", help="DEBUG | INFO | WARNING")

    parser = Parser(prog="lsirm", description="Latent space item response models for roll-call votes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="synthetic roll calls")
    _scenario_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", parents=[common], help="Voteview long-format votes to a vote matrix")
    p.add_argument("--votes", required=True)
    p.add_argument("--config", help="IngestConfig JSON file")
    p.add_argument("--threshold", type=float, help="lopsided threshold (minimum minority share)")
    p.add_argument("--legislator-column")
    p.add_argument("--bill-column")
    p.add_argument("--code-column")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", parents=[common], help="latent space model chains")
    p.add_argument("--data", required=True)
    p.add_argument("--hyper", help="Hyperparams JSON file")
    p.add_argument("--dims", type=int, help="latent dimension K")
    _sampler_flags(p)
    p.add_argument("--holdout-frac", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("fit-birt", parents=[common], help="probit IRT comparator")
    p.add_argument("--data", required=True)
    p.add_argument("--dims", type=int)
    p.add_argument("--prior-sd", type=float, default=1.0)
    _sampler_flags(p, chains=False)
    p.add_argument("--holdout-frac", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_birt)

    p = sub.add_parser("align", parents=[common], help="aligned posterior coordinates")
    p.add_argument("--chain", required=True)
    p.add_argument("--data")
    p.add_argument("--reference-index", type=int, default=-1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("metrics", parents=[common], help="fit quality report")
    p.add_argument("--chain", required=True, nargs="+", help="chain file(s); extra chains feed the gamma summary")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", help="label key used for silhouettes")
    p.add_argument("--estimator", choices=["plugin", "draw_average"], default="plugin")
    p.add_argument("--holdout", help="holdout CSV written by fit --holdout-frac")
    p.add_argument("--n-triples", type=int, default=1000)
    p.add_argument("--top-bills", type=int, default=5, help="bills listed at each end of every axis")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("audit-metric", parents=[common], help="triangle-inequality audit")
    p.add_argument("--form", choices=["all", "euclidean", "quadratic", "gaussian_utility"], default="all")
    p.add_argument("--n-triples", type=int, default=100000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("replicate", parents=[common], help="scenario x seeds sweep")
    _scenario_flags(p)
    p.add_argument("--seeds", type=int, default=10, help="number of consecutive seeds from --seed")
    p.add_argument("--seed-list", type=int, nargs="+")
    p.add_argument("--hyper")
    p.add_argument("--dims", type=int)
    _sampler_flags(p, chains=False)
    p.add_argument("--no-birt", action="store_true")
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("plot-data", parents=[common], help="SVG scatter + tidy CSV")
    p.add_argument("--aligned", required=True)
    p.add_argument("--data")
    p.add_argument("--labels")
    p.add_argument("--title")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        set_log_level(args.log_level)
    if args.workers is not None:
        set_workers(args.workers)
    try:
        return args.func(args)
    except (ValidationError, ConfigError) as e:
        logger.debug("configuration error", exc_info=True)
        print(f"❌ configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ContractViolation, FileNotFoundError) as e:
        logger.debug("data error", exc_info=True)
        print(f"❌ data error: {e}", file=sys.stderr)
        return EXIT_DATA
