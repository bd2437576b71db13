"""Command-line entry point.

Exit status: 0 when a verdict was reached (either way), 1 on usage or input
errors, 2 when a guard or search limit stopped the computation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import TextIO

from . import catalog
from .bks import EmptyParty, bks_admissible
from .catalog import CatalogError, Context, RaySet, Scenario, serialize_scenario
from .coloring import VacuousInstance, ks_colorable
from .correlations import ConstructionError, check_nosignaling, correlation, theorem1_construct
from .exactnum import format_scalar
from .games import DEFAULT_GUARD, GuardExceeded, classical_value, game_from_zeros, quantum_value
from .linalg import PureState, Matrix
from .orthograph import build_graph, export_dot, export_json, party_membership, scenario_rayset
from .search import NoBKSFound, minimal_bks_search

SUBCOMMANDS = (
    "verify-ks",
    "verify-bks",
    "correlation",
    "construct-bks",
    "game-value",
    "search-bks",
    "export-graph",
    "catalog-list",
)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    source: str | None = None
    output_format: str = "json"
    guard: int = DEFAULT_GUARD
    workers: int = 1
    checkpoint: str | None = None
    max_product: int | None = None
    pool: str = "all"
    pretty: bool = False
    input_dist: str | None = None
    split: str | None = None

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand != "catalog-list" and not self.source:
            raise UsageError(f"{self.subcommand} needs a file or builtin name")
        if self.subcommand == "search-bks" and (self.max_product is None or self.max_product < 1):
            raise UsageError("search-bks needs --max-product N with N >= 1")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        if self.guard < 1:
            raise UsageError("--guard must be positive")
        if self.pool not in ("all", "declared"):
            raise UsageError("--pool is 'all' or 'declared'")
        formats = {"export-graph": ("dot", "json"), "construct-bks": ("scenario", "json")}
        allowed = formats.get(self.subcommand, ("json",))
        if self.output_format not in allowed:
            raise UsageError(f"{self.subcommand} supports --format {'|'.join(allowed)}")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bpqs", description="Exact KS / bipartite-KS verification and nonlocal game values.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def src(sp, help_="catalog file or builtin name"):
        sp.add_argument("source", help=help_)

    sp = sub.add_parser("verify-ks", help="decide KS colorability of a ray set")
    src(sp)
    sp = sub.add_parser("verify-bks", help="decide whether a scenario's contexts form a bipartite KS set")
    src(sp)
    sp = sub.add_parser("correlation", help="exact correlation table of a scenario")
    src(sp)
    sp.add_argument("--pretty", action="store_true", help="add informational float approximations")
    sp = sub.add_parser("construct-bks", help="build (S_A, S_B) on Alice's space from a scenario")
    src(sp)
    sp.add_argument("--format", dest="output_format", default="scenario")
    sp = sub.add_parser("game-value", help="classical and quantum values of the zeros game")
    src(sp)
    sp.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    sp.add_argument("--pi", dest="input_dist", help="JSON file with an |X| x |Y| grid of input probabilities")
    sp.add_argument("--pretty", action="store_true")
    sp = sub.add_parser("search-bks", help="minimal |X|*|Y| bipartite KS distribution of a ray set's bases")
    src(sp)
    sp.add_argument("--max-product", type=int, required=True)
    sp.add_argument("--pool", choices=("declared", "all"), default="all")
    sp.add_argument("--checkpoint")
    sp.add_argument("--workers", type=int, default=1)
    sp = sub.add_parser("export-graph", help="orthogonality graph as DOT or JSON")
    src(sp)
    sp.add_argument("--format", dest="output_format", default="dot")
    sp.add_argument("--split", help="scenario whose party assignment colors the vertices")
    sub.add_parser("catalog-list", help="list builtin catalogs")
    return p


def config_from_args(argv: list[str] | None) -> tuple[RunConfig, bool]:
    ns = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    cfg = RunConfig(**fields)
    cfg.validate()
    return cfg, ns.verbose


# -- helpers ------------------------------------------------------------------


def _load(source: str) -> RaySet | Scenario:
    try:
        return catalog.load(source)
    except FileNotFoundError as e:
        raise UsageError(str(e)) from None


def _load_rayset(source: str) -> RaySet:
    obj = _load(source)
    if isinstance(obj, Scenario):
        return scenario_rayset(obj)
    return obj


def _load_scenario(source: str) -> Scenario:
    obj = _load(source)
    if not isinstance(obj, Scenario):
        raise UsageError(f"{source!r} is a ray set; this subcommand needs a scenario")
    return obj


def _ray_str(ray) -> str:
    return "(" + ",".join(format_scalar(e) for e in ray) + ")"


def _context_json(ctx: Context) -> dict:
    return {
        "label": ctx.label,
        "elements": [
            _ray_str(p.ray) if p.ray is not None else [[format_scalar(x) for x in r] for r in p.matrix.rows]
            for p in ctx.projectors
        ],
    }


def _emit(doc, out: TextIO) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# -- subcommands ------------------------------------------------------------


def _verify_ks(cfg: RunConfig, out: TextIO) -> int:
    rs = _load_rayset(cfg.source)
    res = ks_colorable(rs)
    doc = {"verdict": "colorable" if res.colorable else "KS", "stats": res.stats}
    if res.colorable:
        doc["witness"] = {
            "ones": [rs.names[i] for i, b in sorted(res.assignment.items()) if b],
            "assignment": {rs.names[i]: b for i, b in res.assignment.items()},
        }
    _emit(doc, out)
    return 0


def _verify_bks(cfg: RunConfig, out: TextIO) -> int:
    sc = _load_scenario(cfg.source)
    res = bks_admissible(sc)
    doc = {"verdict": "admissible" if res.admissible else "B-KS", "stats": res.stats}
    if res.admissible:
        s = res.strategy
        doc["witness"] = {
            "alice": {c.label or f"x{i}": k for i, (c, k) in enumerate(zip(sc.alice_contexts, s.alice_choice))},
            "bob": {c.label or f"y{j}": k for j, (c, k) in enumerate(zip(sc.bob_contexts, s.bob_choice))},
        }
    _emit(doc, out)
    return 0


def _correlation(cfg: RunConfig, out: TextIO) -> int:
    sc = _load_scenario(cfg.source)
    t = correlation(sc)
    rows = []
    for x, y, a, b in t.positions():
        v = t.values[x, y, a, b]
        row = {"x": x, "y": y, "a": a, "b": b, "p": format_scalar(v)}
        if cfg.pretty:
            row["approx_informational"] = round(float(v), 12)
        rows.append(row)
    doc = {
        "sizes": {"X": t.n_x, "Y": t.n_y, "A": list(t.alice_sizes), "B": list(t.bob_sizes)},
        "no_signaling": check_nosignaling(t),
        "values": rows,
    }
    _emit(doc, out)
    return 0


def _construct(cfg: RunConfig, out: TextIO) -> int:
    sc = _load_scenario(cfg.source)
    s_a, s_b = theorem1_construct(sc)
    if cfg.output_format == "json":
        _emit({"S_A": [_context_json(c) for c in s_a], "S_B": [_context_json(c) for c in s_b]}, out)
    else:
        # both families act on Alice's space; the identity state is a placeholder
        built = Scenario(PureState(Matrix.identity(sc.d_a)), s_a, s_b, sc.radical, sc.name)
        out.write(serialize_scenario(built))
    return 0


def _read_input_dist(path: str, n_x: int, n_y: int) -> dict[tuple[int, int], Fraction]:
    try:
        grid = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read input distribution: {e}") from None
    if len(grid) != n_x or any(len(r) != n_y for r in grid):
        raise UsageError(f"input distribution must be a {n_x} x {n_y} grid")
    return {(x, y): Fraction(str(grid[x][y])) for x in range(n_x) for y in range(n_y)}


def _game_value(cfg: RunConfig, out: TextIO) -> int:
    sc = _load_scenario(cfg.source)
    t = correlation(sc)
    game = game_from_zeros(t)
    if cfg.input_dist:
        game = game.with_input_dist(_read_input_dist(cfg.input_dist, t.n_x, t.n_y))
    cv = classical_value(game, cfg.guard)
    omega_q = quantum_value(t, game)
    losing = [[x, y] for x in range(game.n_x) for y in range(game.n_y)
              if game.input_dist[x, y] and not cv.strategy.wins(game, x, y)]
    doc = {
        "omega_c": format_scalar(cv.value),
        "omega_q": format_scalar(omega_q),
        "bpqs": bool(cv.value < 1 and omega_q == 1),
        "witness": {"alice": list(cv.strategy.alice), "bob": list(cv.strategy.bob), "losing_inputs": losing},
        "stats": {"alice_strategies": cv.candidates},
    }
    if cfg.pretty:
        doc["approx_informational"] = {"omega_c": float(cv.value), "omega_q": float(omega_q)}
    _emit(doc, out)
    return 0


def _search(cfg: RunConfig, out: TextIO) -> int:
    rs = _load_rayset(cfg.source)
    res = minimal_bks_search(rs, cfg.max_product, cfg.pool, cfg.checkpoint, cfg.workers)
    s_a, s_b = res.contexts()
    doc = {
        "best": {"S_A": list(res.best[0]), "S_B": list(res.best[1])},
        "product": res.product,
        "sum": res.sum,
        "exhaustive_below": res.exhaustive_below,
        "explored": res.explored,
        "contexts": {"S_A": [_context_json(c) for c in s_a], "S_B": [_context_json(c) for c in s_b]},
    }
    _emit(doc, out)
    return 0


def _export_graph(cfg: RunConfig, out: TextIO) -> int:
    obj = _load(cfg.source)
    coloring = None
    if isinstance(obj, Scenario):
        rs = scenario_rayset(obj)
        coloring = party_membership(rs, obj.alice_contexts, obj.bob_contexts)
    else:
        rs = obj
    if cfg.split:
        split = _load_scenario(cfg.split)
        coloring = party_membership(rs, split.alice_contexts, split.bob_contexts)
    g = build_graph(rs)
    if cfg.output_format == "json":
        out.write(export_json(g) + "\n")
    else:
        out.write(export_dot(g, coloring, Path(cfg.source).stem))
    return 0


def _catalog_list(cfg: RunConfig, out: TextIO) -> int:
    rows = []
    for name in sorted(catalog.BUILTINS):
        obj = catalog.builtin(name)
        if isinstance(obj, RaySet):
            rows.append({"name": name, "kind": "rays", "dim": obj.dimension, "rays": len(obj),
                         "contexts": len(obj.declared_contexts)})
        else:
            rows.append({"name": name, "kind": "scenario", "dim": [obj.d_a, obj.d_b],
                         "X": obj.n_x, "Y": obj.n_y, "A": obj.n_a, "B": obj.n_b})
    _emit(rows, out)
    return 0


_HANDLERS = {
    "verify-ks": _verify_ks,
    "verify-bks": _verify_bks,
    "correlation": _correlation,
    "construct-bks": _construct,
    "game-value": _game_value,
    "search-bks": _search,
    "export-graph": _export_graph,
    "catalog-list": _catalog_list,
}


def _fail(err: TextIO, kind: str, message: str, code: int) -> int:
    err.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def dispatch(cfg: RunConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        cfg.validate()
        return _HANDLERS[cfg.subcommand](cfg, out)
    except (GuardExceeded, NoBKSFound) as e:
        return _fail(err, type(e).__name__, str(e), 2)
    except (UsageError, CatalogError, VacuousInstance, EmptyParty, ConstructionError, ValueError) as e:
        return _fail(err, type(e).__name__, str(e), 1)


def main(argv: list[str] | None = None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        cfg, verbose = config_from_args(argv)
    except UsageError as e:
        return _fail(err, "UsageError", str(e), 1)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return dispatch(cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())
