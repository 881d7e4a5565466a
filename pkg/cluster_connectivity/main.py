"""
Main Application Entry Point
=============================
Orchestrates the toolkit components behind one command-line interface.

Subcommands:
    treat    CC / WCC treatment of a clustering
    dl       Description length of a clustering (DC or NDC)
    infer    Fit a flat SBM (dc, ndc or chosen)
    profile  Connectivity profile of a clustering
    eval     Density-filtered accuracy against a ground truth
    gen      Synthetic fixtures (cliques, planted)
    density  Per-node cluster densities and density bins

Exit codes: 0 success, 1 usage, 2 I/O or parse error, 3 contract violation.

Usage:
    python -m cluster_connectivity <subcommand> [options]
"""

import argparse
import logging
import sys
import time
from pathlib import Path

# Ensure project root is on sys.path for direct execution
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from cluster_connectivity.core.dl import DlConfig, SbmModel, beta_sweep, compare_reports, compute_dl, relative_dl
from cluster_connectivity.core.errors import (
    ClusteringParseError,
    ConfigError,
    ContractViolationError,
    EdgeListParseError,
    GraphDomainError,
)
from cluster_connectivity.core.graph import load_edgelist
from cluster_connectivity.core.inference import InferenceConfig, fit
from cluster_connectivity.core.metrics import EVAL_COLUMNS, cluster_densities, density_bins, filtered_eval
from cluster_connectivity.core.synthgen import CliqueFixtureSpec, PlantedSpec, gen_cliques, gen_planted
from cluster_connectivity.core.treatments import ConnectivityTreatment
from cluster_connectivity.reports.clustering_file import attach_clustering, load_clustering, read_clustering
from cluster_connectivity.reports.report_writer import ReportWriter
from cluster_connectivity.utils.config_loader import load_config
from cluster_connectivity.utils.logger import setup_logging

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONTRACT = 3

logger = logging.getLogger(__name__)


class ClusterConnectivityToolkit:
    """
    Toolkit orchestrator.

    Coordinates:
    - Edge-list and clustering input
    - Treatments, description length, inference, profiles and metrics
    - Atomic report output
    """

    def __init__(self, config=None):
        """
        Args:
            config: Configuration dict (see utils.config_loader.get_default_config)
        """
        self.config = config or load_config()
        self.writer = ReportWriter(self.config.get("reports", {}))
        self.timings = {}

    def _timed(self, name, fn, *args, **kwargs):
        started = time.perf_counter()
        result = fn(*args, **kwargs)
        self.timings[name] = time.perf_counter() - started
        return result

    def load_graph(self, edgelist):
        return self._timed("load_seconds", load_edgelist, edgelist)

    def load_clustered(self, edgelist, clustering):
        return load_clustering(self.load_graph(edgelist), clustering)

    def treat(self, edgelist, clustering, treatment, output):
        """
        Apply CC or WCC and write the treated clustering.

        Args:
            treatment: ConnectivityTreatment

        Returns:
            dict summary
        """
        attached = self.load_clustered(edgelist, clustering)
        g, p = attached.graph, attached.partition
        treated = self._timed("treatment_seconds", treatment.treat, g, p)

        # a treated cluster inherits the source label of the cluster it came from
        sources = tuple(attached.cluster_labels[p.assignment[m[0]]] for m in treated.clusters)
        self.writer.write_clustering(output, g, treated, sources)
        return {
            "criterion": treatment.criterion,
            "clusters_in": p.num_clusters,
            "clusters_out": treated.num_clusters,
            "missing_nodes": len(attached.missing_nodes),
            **self.timings,
        }

    def description_length(self, edgelist, clustering, dl_config, output, compare_to=None, betas=None):
        attached = self.load_clustered(edgelist, clustering)
        g = attached.graph
        report = compute_dl(g, attached.partition, dl_config)
        data = report.to_dict()
        if compare_to:
            baseline_entries = read_clustering(compare_to)
            g = g.with_isolated_nodes(baseline_entries)
            if g.num_nodes != attached.graph.num_nodes:
                raise GraphDomainError("The comparison clustering names nodes missing from the other clustering")
            baseline = compute_dl(g, attach_clustering(g, baseline_entries).partition, dl_config)
            try:
                ratio = relative_dl(report, baseline)
            except GraphDomainError as e:
                logger.warning(f"{e}; reporting relative_dl as null")
                ratio = None
            data["comparison"] = {
                "baseline": baseline.to_dict(),
                "differences": compare_reports(report, baseline),
                "relative_dl": ratio,
            }
        if betas:
            data["beta_sweep"] = [
                r.to_dict() for r in beta_sweep(g, attached.partition, dl_config.model, betas, dl_config.edges_dl)
            ]
        self.writer.write_json(output, data)
        return data

    def infer(self, edgelist, inference_config, num_processors, output_clustering, output_report):
        g = self.load_graph(edgelist)
        result = self._timed("inference_seconds", fit, g, inference_config, num_processors)
        self.writer.write_clustering(output_clustering, g, result.partition)
        data = result.to_dict()
        data["seed"] = inference_config.seed
        data["restarts"] = inference_config.restarts
        data["accepted"] = result.accepted
        self.writer.write_json(output_report, data)
        return data

    def profile(self, edgelist, clustering, treatment, output):
        attached = self.load_clustered(edgelist, clustering)
        result = self._timed("profile_seconds", treatment.profile, attached.graph, attached.partition)
        data = result.to_dict()
        data["missing_nodes"] = len(attached.missing_nodes)
        self.writer.write_json(output, data)
        return data

    def evaluate(self, edgelist, gt_clustering, est_clustering, thresholds, min_size, average_method, output):
        g = self.load_graph(edgelist)
        gt_entries = read_clustering(gt_clustering)
        est_entries = read_clustering(est_clustering)
        g = g.with_isolated_nodes(gt_entries).with_isolated_nodes(est_entries)
        gt = attach_clustering(g, gt_entries).partition
        est = attach_clustering(g, est_entries).partition
        rows = [row.to_dict() for row in filtered_eval(g, gt, est, thresholds, min_size, average_method)]
        csv_path, json_path = eval_output_paths(output)
        self.writer.write_csv(csv_path, rows, EVAL_COLUMNS)
        self.writer.write_json(json_path, rows)
        return rows

    def generate(self, spec, output_edgelist, output_clustering):
        g, truth = gen_cliques(spec) if isinstance(spec, CliqueFixtureSpec) else gen_planted(spec)
        self.writer.write_edgelist(output_edgelist, g)
        self.writer.write_clustering(output_clustering, g, truth)
        return {"nodes": g.num_nodes, "edges": g.num_edges, "clusters": truth.num_clusters}

    def density(self, edgelist, clustering, output, bins_output=None, bin_edges=None):
        attached = self.load_clustered(edgelist, clustering)
        g, p = attached.graph, attached.partition
        dens = cluster_densities(g, p)
        rows = [
            {"node": g.external_ids[i], "cluster": int(c), "density": float(dens[c])}
            for i, c in enumerate(p.assignment.tolist())
        ]
        self.writer.write_csv(output, rows, ("node", "cluster", "density"))
        if bins_output:
            edges = bin_edges or self.config["metrics"]["density_bin_edges"]
            self.writer.write_csv(
                bins_output, density_bins(g, p, edges), ("bin", "lo", "hi", "clusters", "median_size", "node_percent")
            )
        return {"clusters": p.num_clusters, "nodes": g.num_nodes}


def eval_output_paths(output):
    """CSV and JSON paths for an eval table; a .json output names the JSON file."""
    output = Path(output)
    if output.suffix.lower() == ".json":
        return output.with_suffix(".csv"), output
    return output, output.with_suffix(".json")


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _pick(value, section, key):
    return section.get(key) if value is None else value


def _treatment(toolkit, args, **overrides):
    section = dict(toolkit.config["treatment"])
    overrides["threshold_rule"] = args.threshold_rule
    overrides["num_processors"] = args.num_processors
    section.update({k: v for k, v in overrides.items() if v is not None})
    return ConnectivityTreatment(section)


def cmd_treat(toolkit, args):
    treatment = _treatment(toolkit, args, criterion=args.connectedness_criterion)
    summary = toolkit.treat(args.edgelist, args.existing_clustering, treatment, args.output_file)
    print(
        f"{summary['criterion'].upper()}: {summary['clusters_in']} clusters in, {summary['clusters_out']} out "
        f"({summary['missing_nodes']} missing nodes as singletons); "
        f"load {summary['load_seconds']:.2f}s, treatment {summary['treatment_seconds']:.2f}s"
    )
    return EXIT_OK


def _dl_config(args, section):
    return DlConfig(
        model=SbmModel.parse(_pick(args.model, section, "model")),
        beta=float(_pick(args.beta, section, "beta")),
        edges_dl=False if args.no_edges_dl else bool(section.get("edges_dl", True)),
    )


def cmd_dl(toolkit, args):
    data = toolkit.description_length(
        args.edgelist, args.existing_clustering, _dl_config(args, toolkit.config["dl"]),
        args.output_file, args.compare_to, args.betas,
    )
    print(f"{data['model'].upper()} description length: {data['total']:.6f} nats (B={data['num_blocks']})")
    return EXIT_OK


def cmd_infer(toolkit, args):
    section = dict(toolkit.config["inference"])
    overrides = {
        "model": args.model,
        "beta": args.beta,
        "seed": args.seed,
        "restarts": args.restarts,
    }
    section.update({k: v for k, v in overrides.items() if v is not None})
    if args.no_edges_dl:
        section["edges_dl"] = False
    cfg = InferenceConfig.from_dict(section)
    data = toolkit.infer(
        args.edgelist, cfg, _pick(args.num_processors, toolkit.config["inference"], "num_processors"),
        args.output_clustering, args.output_file,
    )
    print(
        f"Selected {data['model_selected'].upper()}-Flat: B={data['num_blocks']}, "
        f"DL={data['total']:.6f} nats over {cfg.restarts} restarts"
    )
    return EXIT_OK


def cmd_profile(toolkit, args):
    data = toolkit.profile(args.edgelist, args.existing_clustering, _treatment(toolkit, args), args.output_file)
    if data["percentages"] is None:
        print("No non-singleton clusters")
    else:
        pct = data["percentages"]
        print(
            f"{data['num_non_singleton']} non-singleton clusters: {pct['disconnected']:.1f}% disconnected, "
            f"{pct['poorly_connected']:.1f}% poorly connected, {pct['well_connected']:.1f}% well connected"
        )
    return EXIT_OK


def cmd_eval(toolkit, args):
    section = toolkit.config["metrics"]
    rows = toolkit.evaluate(
        args.edgelist, args.gt_clustering, args.est_clustering,
        _pick(args.thresholds, section, "thresholds"), _pick(args.min_size, section, "min_size"),
        section.get("average_method", "arithmetic"), args.output_file,
    )
    for row in rows:
        ari = "absent" if row["ari"] is None else f"{row['ari']:.4f}"
        print(f"t={row['threshold']:g}: {row['retained_nodes']} nodes, ARI {ari}")
    return EXIT_OK


def cmd_gen(toolkit, args):
    seed = _pick(args.seed, toolkit.config["synthgen"], "seed")
    if args.fixture == "cliques":
        spec = CliqueFixtureSpec(args.num_cliques, args.clique_size, args.bridges, seed)
    else:
        spec = PlantedSpec(tuple(args.blocks), args.p_in, args.p_out, seed)
    summary = toolkit.generate(spec, args.output_edgelist, args.output_clustering)
    print(f"{summary['nodes']} nodes, {summary['edges']} edges, {summary['clusters']} ground-truth clusters")
    return EXIT_OK


def cmd_density(toolkit, args):
    summary = toolkit.density(args.edgelist, args.existing_clustering, args.output_file, args.bins_output)
    print(f"Densities of {summary['clusters']} clusters over {summary['nodes']} nodes")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to configuration file")
    common.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"))
    common.add_argument("--log-file", help="Also write a DEBUG-level log to this file")

    clustered = argparse.ArgumentParser(add_help=False)
    clustered.add_argument("--edgelist", required=True, help="Tab/whitespace-separated edge list")
    clustered.add_argument("--existing-clustering", required=True, help="node<TAB>cluster file")

    parser = UsageArgumentParser(prog="cluster-connectivity", description="Cluster connectivity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("treat", parents=[common, clustered], help="CC / WCC treatment")
    p.add_argument("--connectedness-criterion", choices=("cc", "wcc"))
    p.add_argument("--threshold-rule", help="log10, none, constant:<c> or a number")
    p.add_argument("--num-processors", type=_positive_int)
    p.add_argument("--output-file", required=True)
    p.set_defaults(handler=cmd_treat)

    p = sub.add_parser("dl", parents=[common, clustered], help="Description length of a clustering")
    p.add_argument("--model", choices=("dc", "ndc"))
    p.add_argument("--beta", type=float)
    p.add_argument("--no-edges-dl", action="store_true", help="Drop the edge-count-matrix prior")
    p.add_argument("--compare-to", help="Clustering to compare against (component differences)")
    p.add_argument("--betas", type=_float_list, help="Comma-separated prior weights for a sweep")
    p.add_argument("--output-file", required=True)
    p.set_defaults(handler=cmd_dl)

    p = sub.add_parser("infer", parents=[common], help="Fit a flat SBM")
    p.add_argument("--edgelist", required=True)
    p.add_argument("--model", choices=("dc", "ndc", "chosen"))
    p.add_argument("--beta", type=float)
    p.add_argument("--no-edges-dl", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=_positive_int)
    p.add_argument("--num-processors", type=_positive_int)
    p.add_argument("--output-clustering", required=True)
    p.add_argument("--output-file", required=True, help="JSON report")
    p.set_defaults(handler=cmd_infer)

    p = sub.add_parser("profile", parents=[common, clustered], help="Connectivity profile")
    p.add_argument("--threshold-rule")
    p.add_argument("--num-processors", type=_positive_int)
    p.add_argument("--output-file", required=True)
    p.set_defaults(handler=cmd_profile)

    p = sub.add_parser("eval", parents=[common], help="Density-filtered accuracy")
    p.add_argument("--edgelist", required=True)
    p.add_argument("--gt-clustering", required=True)
    p.add_argument("--est-clustering", required=True)
    p.add_argument("--thresholds", type=_float_list, help="Comma-separated ascending thresholds")
    p.add_argument("--min-size", type=_positive_int)
    p.add_argument("--output-file", required=True, help="CSV table path, or a .json path; both files are written")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("gen", help="Synthetic fixtures")
    fixtures = p.add_subparsers(dest="fixture", required=True)
    for name in ("cliques", "planted"):
        f = fixtures.add_parser(name, parents=[common])
        f.add_argument("--seed", type=int)
        f.add_argument("--output-edgelist", required=True)
        f.add_argument("--output-clustering", required=True)
        f.set_defaults(handler=cmd_gen)
        if name == "cliques":
            f.add_argument("--num-cliques", type=int, required=True)
            f.add_argument("--clique-size", type=int, required=True)
            f.add_argument("--bridges", type=int, default=0)
        else:
            f.add_argument("--blocks", type=_int_list, required=True, help="Comma-separated block sizes")
            f.add_argument("--p-in", type=float, required=True)
            f.add_argument("--p-out", type=float, required=True)

    p = sub.add_parser("density", parents=[common, clustered], help="Per-node cluster densities")
    p.add_argument("--output-file", required=True, help="CSV: node, cluster, density")
    p.add_argument("--bins-output", help="Optional CSV of density bins")
    p.set_defaults(handler=cmd_density)
    return parser


def main(argv=None):
    """
    Main entry point.

    Returns:
        int exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        config = load_config(args.config)
        logging_config = dict(config.get("logging", {}))
        if args.log_level:
            logging_config["level"] = args.log_level
        if args.log_file:
            logging_config["log_file"] = args.log_file
        setup_logging(logging_config)
        toolkit = ClusterConnectivityToolkit(config)
        code = args.handler(toolkit, args)
        logger.info(f"Wrote {len(toolkit.writer.written)} files: {', '.join(str(p) for p in toolkit.writer.written)}")
        return code
    except ConfigError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except (EdgeListParseError, ClusteringParseError, OSError) as e:
        logger.error(f"Input/output error: {e}")
        return EXIT_IO
    except (GraphDomainError, ContractViolationError) as e:
        logger.error(f"Contract violation: {e}")
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
