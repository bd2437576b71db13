"""Ray catalogs and two-party scenarios: data types, file format, builtins.

File format (line oriented, ``#`` starts a comment)::

    dim=4 radical=0
    ray e0 = (1, 0, 0, 0)
    context x0 = e0 e1 e2 e3

Scenario files additionally carry a ``state`` line and ``side A`` / ``side B``
blocks.  ``dim`` may be a single integer or ``dA,dB``::

    dim=3 radical=2
    state = identity            # or [c00, c01, ...; c10, ...]
    side A
    ray a0 = (0, 1, sqrt(2))
    proj P = [1/2, 1/2, 0; 1/2, 1/2, 0; 0, 0, 0]
    context x0 = a0 ...
    side B
    ...

Names are scoped to the block in which they are declared; names declared
before the first ``side`` line are visible to both sides.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .exactnum import QuadExt, format_scalar, is_square_free, parse_scalar
from .linalg import Matrix, Projector, PureState, Ray, ray_projector

__all__ = [
    "CatalogError",
    "InvalidContext",
    "Context",
    "RaySet",
    "Scenario",
    "validate_context",
    "parse_rayset",
    "parse_scenario",
    "parse_catalog",
    "serialize_rayset",
    "serialize_scenario",
    "builtin",
    "BUILTINS",
    "load",
]


class CatalogError(ValueError):
    """Malformed catalog text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class InvalidContext(ValueError):
    """A set of projectors that is not mutually orthogonal or does not sum to 1."""


@dataclass(frozen=True)
class Context:
    projectors: tuple[Projector, ...]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "projectors", tuple(self.projectors))

    @classmethod
    def from_rays(cls, rays: Iterable[Ray | Sequence], label: str = "") -> Context:
        return cls(tuple(ray_projector(r) for r in rays), label)

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    @property
    def rays(self) -> tuple[Ray | None, ...]:
        return tuple(p.ray for p in self.projectors)

    def is_rank_one(self) -> bool:
        return all(p.rank == 1 for p in self.projectors)

    def __len__(self) -> int:
        return len(self.projectors)

    def __iter__(self):
        return iter(self.projectors)


def validate_context(projectors: Sequence[Projector], label: str = "") -> None:
    """Raise :class:`InvalidContext` unless the projectors form a complete orthogonal set."""
    if not projectors:
        raise InvalidContext(f"context {label!r} is empty")
    d = projectors[0].dim
    for p in projectors:
        if p.dim != d:
            raise InvalidContext(f"context {label!r} mixes dimensions")
    for i in range(len(projectors)):
        for j in range(i + 1, len(projectors)):
            if not projectors[i].orthogonal_to(projectors[j]):
                raise InvalidContext(f"context {label!r}: elements {i} and {j} are not orthogonal")
    total = Matrix.zeros(d)
    for p in projectors:
        total = total + p.matrix
    if total != Matrix.identity(d):
        raise InvalidContext(f"context {label!r} does not sum to the identity")


@dataclass(frozen=True)
class RaySet:
    """Deduplicated rank-one rays in dimension ``dimension``, sorted canonically."""

    dimension: int
    radical: int
    rays: tuple[Ray, ...]
    names: tuple[str, ...] = ()
    declared_contexts: tuple[Context, ...] = ()

    def __post_init__(self) -> None:
        rays = tuple(self.rays)
        names = tuple(self.names) or tuple(f"r{i}" for i in range(len(rays)))
        if len(names) != len(rays):
            raise ValueError("one name per ray")
        if len(set(rays)) != len(rays):
            raise ValueError("rays are not distinct")
        if any(r.dim != self.dimension for r in rays):
            raise ValueError("ray of wrong dimension")
        order = sorted(range(len(rays)), key=lambda i: rays[i])
        object.__setattr__(self, "rays", tuple(rays[i] for i in order))
        object.__setattr__(self, "names", tuple(names[i] for i in order))
        object.__setattr__(self, "declared_contexts", tuple(self.declared_contexts))
        index = {r: i for i, r in enumerate(self.rays)}
        for ctx in self.declared_contexts:
            for p in ctx.projectors:
                if p.ray is None or p.ray not in index:
                    raise ValueError(f"context {ctx.label!r} references a ray outside the set")
            validate_context(ctx.projectors, ctx.label)

    @classmethod
    def from_rays(cls, rays: Iterable[Ray | Sequence], contexts: Iterable[Context] = (), radical: int | None = None) -> RaySet:
        uniq: list[Ray] = []
        seen = set()
        for r in rays:
            r = r if isinstance(r, Ray) else Ray(r)
            if r not in seen:
                seen.add(r)
                uniq.append(r)
        if not uniq:
            raise ValueError("empty ray set")
        if radical is None:
            radical = max(r.radical for r in uniq)
        return cls(uniq[0].dim, radical, tuple(uniq), (), tuple(contexts))

    def __len__(self) -> int:
        return len(self.rays)

    def index(self, ray: Ray) -> int:
        return self._index[ray]

    @property
    def _index(self) -> dict[Ray, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {r: i for i, r in enumerate(self.rays)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def context_indices(self, ctx: Context) -> tuple[int, ...]:
        return tuple(self._index[p.ray] for p in ctx.projectors)

    def projectors(self) -> list[Projector]:
        return [ray_projector(r) for r in self.rays]


@dataclass(frozen=True)
class Scenario:
    """A shared state plus the measurement contexts of both parties."""

    state: PureState
    alice_contexts: tuple[Context, ...]
    bob_contexts: tuple[Context, ...]
    radical: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "alice_contexts", tuple(self.alice_contexts))
        object.__setattr__(self, "bob_contexts", tuple(self.bob_contexts))
        d_a, d_b = self.state.dims
        for side, ctxs, d in (("A", self.alice_contexts, d_a), ("B", self.bob_contexts, d_b)):
            for ctx in ctxs:
                if ctx.dim != d:
                    raise ValueError(f"side {side} context {ctx.label!r} acts on dimension {ctx.dim}, expected {d}")
                validate_context(ctx.projectors, ctx.label)

    @property
    def d_a(self) -> int:
        return self.state.dims[0]

    @property
    def d_b(self) -> int:
        return self.state.dims[1]

    @property
    def n_x(self) -> int:
        return len(self.alice_contexts)

    @property
    def n_y(self) -> int:
        return len(self.bob_contexts)

    @property
    def n_a(self) -> int:
        return max((len(c) for c in self.alice_contexts), default=0)

    @property
    def n_b(self) -> int:
        return max((len(c) for c in self.bob_contexts), default=0)

    def sub_scenario(self, xs: Sequence[int], ys: Sequence[int]) -> Scenario:
        return Scenario(
            self.state,
            tuple(self.alice_contexts[i] for i in xs),
            tuple(self.bob_contexts[j] for j in ys),
            self.radical,
            self.name,
        )


# -- parsing ----------------------------------------------------------------

_HEADER = re.compile(r"^dim\s*=\s*(\d+)(?:\s*,\s*(\d+))?\s+radical\s*=\s*(\d+)\s*$")
_DECL = re.compile(r"^(ray|proj|context)\s+([A-Za-z_][\w.\-]*)\s*=\s*(.*)$")
_STATE = re.compile(r"^state\s*=\s*(.*)$")
_SIDE = re.compile(r"^side\s+([AB])\s*$")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.dims: tuple[int, int] | None = None
        self.radical = 0
        self.state: Matrix | None = None
        self.side: str | None = None
        self.saw_side = False
        # scope -> name -> Projector ; scope None is global
        self.scopes: dict[str | None, dict[str, Projector]] = {None: {}, "A": {}, "B": {}}
        self.names_of: dict[str | None, dict[Ray, str]] = {None: {}, "A": {}, "B": {}}
        self.ray_order: dict[str | None, list[Ray]] = {None: [], "A": [], "B": []}
        self.contexts: dict[str | None, list[Context]] = {None: [], "A": [], "B": []}

    def err(self, msg: str, lineno: int, col: int | None = None) -> CatalogError:
        return CatalogError(msg, lineno, col)

    def scalar(self, text: str, lineno: int, col: int) -> QuadExt:
        try:
            x = parse_scalar(text)
        except ValueError as e:
            raise self.err(str(e), lineno, col) from None
        if x.r not in (0, self.radical):
            raise self.err(f"sqrt({x.r}) used in a catalog declared with radical={self.radical}", lineno, col)
        return x

    def dim_here(self) -> int:
        assert self.dims is not None
        return self.dims[1] if self.side == "B" else self.dims[0]

    def parse_vector(self, body: str, lineno: int, col: int) -> list[QuadExt]:
        body = body.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise self.err("ray entries must be enclosed in parentheses", lineno, col)
        items = _split_top(body[1:-1], ",")
        return [self.scalar(s, lineno, col) for s in items]

    def parse_grid(self, body: str, lineno: int, col: int) -> Matrix:
        body = body.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise self.err("matrix must be enclosed in brackets", lineno, col)
        rows = [_split_top(r, ",") for r in body[1:-1].split(";")]
        try:
            return Matrix([[self.scalar(s, lineno, col) for s in r] for r in rows])
        except ValueError as e:
            if isinstance(e, CatalogError):
                raise
            raise self.err(str(e), lineno, col) from None

    def lookup(self, name: str, lineno: int, col: int) -> Projector:
        for scope in (self.side, None):
            if name in self.scopes[scope]:
                proj = self.scopes[scope][name]
                if proj is None:
                    raise self.err(f"{name!r} is a context, not an element", lineno, col)
                return proj
        raise self.err(f"unknown element {name!r}", lineno, col)

    def declare(self, kind: str, name: str, body: str, lineno: int, col: int) -> None:
        if self.dims is None:
            raise self.err("header 'dim=<d> radical=<r>' must come first", lineno)
        scope = self.side
        if name in self.scopes[scope]:
            raise self.err(f"duplicate name {name!r}", lineno, col)
        if kind == "ray":
            vec = self.parse_vector(body, lineno, col)
            if len(vec) != self.dim_here():
                raise self.err(f"ray has {len(vec)} entries, expected {self.dim_here()}", lineno, col)
            try:
                ray = Ray(vec)
            except ValueError as e:
                raise self.err(str(e), lineno, col) from None
            # projective duplicates share one ray object and keep the first name
            proj = ray_projector(ray)
            self.scopes[scope][name] = proj
            if ray not in self.names_of[scope]:
                self.names_of[scope][ray] = name
                self.ray_order[scope].append(ray)
        elif kind == "proj":
            m = self.parse_grid(body, lineno, col)
            if m.shape != (self.dim_here(), self.dim_here()):
                raise self.err(f"projector shape {m.shape} does not match dimension {self.dim_here()}", lineno, col)
            try:
                self.scopes[scope][name] = Projector.from_matrix(m)
            except ValueError as e:
                raise self.err(str(e), lineno, col) from None
        else:
            members = body.split()
            projs = []
            offset = col
            for tok in members:
                projs.append(self.lookup(tok, lineno, offset))
            try:
                validate_context(projs, name)
            except (InvalidContext, ValueError) as e:
                raise self.err(str(e), lineno, col) from None
            self.contexts[scope].append(Context(tuple(projs), name))
            self.scopes[scope][name] = None  # reserve the label

    def run(self) -> None:
        for lineno, raw in enumerate(self.lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            col = len(raw) - len(raw.lstrip()) + 1
            if self.dims is None:
                m = _HEADER.match(line)
                if not m:
                    raise self.err("expected header 'dim=<d> radical=<r>'", lineno, col)
                d_a = int(m.group(1))
                d_b = int(m.group(2) or d_a)
                r = int(m.group(3))
                if d_a < 2 or d_b < 2:
                    raise self.err("dimension must be at least 2", lineno, col)
                if not is_square_free(r):
                    raise self.err(f"radical {r} is not square-free", lineno, col)
                self.dims = (d_a, d_b)
                self.radical = 0 if r == 1 else r
                continue
            m = _SIDE.match(line)
            if m:
                self.side = m.group(1)
                self.saw_side = True
                continue
            m = _STATE.match(line)
            if m:
                if self.side is not None:
                    raise self.err("state must be declared before the side blocks", lineno, col)
                body = m.group(1).strip()
                if body == "identity":
                    if self.dims[0] != self.dims[1]:
                        raise self.err("identity state needs dA == dB", lineno, col)
                    self.state = Matrix.identity(self.dims[0])
                else:
                    grid = self.parse_grid(body, lineno, col + line.index("=") + 1)
                    if grid.shape != self.dims:
                        raise self.err(f"state grid shape {grid.shape} does not match dim {self.dims}", lineno, col)
                    self.state = grid
                continue
            m = _DECL.match(line)
            if not m:
                raise self.err(f"cannot parse {line!r}", lineno, col)
            self.declare(m.group(1), m.group(2), m.group(3), lineno, col + m.start(3))


def parse_rayset(text: str) -> RaySet:
    p = _Parser(text)
    p.run()
    if p.dims is None:
        raise CatalogError("empty catalog")
    if p.saw_side or p.state is not None:
        raise CatalogError("this is a scenario file, not a ray set")
    if p.dims[0] != p.dims[1]:
        raise CatalogError("ray sets have a single dimension")
    if any(v is not None and v.ray is None for v in p.scopes[None].values()):
        raise CatalogError("ray sets hold rank-one rays only; use a scenario for 'proj'")
    rays = p.ray_order[None]
    if not rays:
        raise CatalogError("no rays declared")
    names = tuple(p.names_of[None][r] for r in rays)
    return RaySet(p.dims[0], p.radical, tuple(rays), names, tuple(p.contexts[None]))


def parse_scenario(text: str, name: str = "") -> Scenario:
    p = _Parser(text)
    p.run()
    if p.dims is None:
        raise CatalogError("empty scenario")
    if p.state is None:
        raise CatalogError("scenario needs a 'state' line")
    if p.contexts[None]:
        raise CatalogError("contexts must be declared inside 'side A' or 'side B'")
    return Scenario(PureState(p.state), tuple(p.contexts["A"]), tuple(p.contexts["B"]), p.radical, name)


def parse_catalog(text: str, name: str = "") -> RaySet | Scenario:
    if re.search(r"^\s*(side\s+[AB]|state\s*=)", text, re.MULTILINE):
        return parse_scenario(text, name)
    return parse_rayset(text)


# -- serialization ----------------------------------------------------------


def _fmt_vec(entries: Iterable) -> str:
    return "(" + ", ".join(format_scalar(e) for e in entries) + ")"


def _fmt_grid(m: Matrix) -> str:
    return "[" + "; ".join(", ".join(format_scalar(x) for x in r) for r in m.rows) + "]"


def serialize_rayset(rs: RaySet) -> str:
    out = [f"dim={rs.dimension} radical={rs.radical}"]
    names = {r: n for r, n in zip(rs.rays, rs.names)}
    for r, n in zip(rs.rays, rs.names):
        out.append(f"ray {n} = {_fmt_vec(r)}")
    for i, ctx in enumerate(rs.declared_contexts):
        label = ctx.label or f"c{i}"
        out.append(f"context {label} = " + " ".join(names[p.ray] for p in ctx.projectors))
    return "\n".join(out) + "\n"


def _side_lines(side: str, contexts: Sequence[Context], prefix: str) -> list[str]:
    out = [f"side {side}"]
    names: dict[Projector, str] = {}
    body: list[str] = []
    for ctx in contexts:
        for p in ctx.projectors:
            if p in names:
                continue
            n = f"{prefix}{len(names)}"
            names[p] = n
            if p.ray is not None:
                body.append(f"ray {n} = {_fmt_vec(p.ray)}")
            else:
                body.append(f"proj {n} = {_fmt_grid(p.matrix)}")
    out.extend(body)
    for i, ctx in enumerate(contexts):
        label = ctx.label or f"{'x' if side == 'A' else 'y'}{i}"
        out.append(f"context {label} = " + " ".join(names[p] for p in ctx.projectors))
    return out


def serialize_scenario(sc: Scenario) -> str:
    d_a, d_b = sc.state.dims
    dim = f"{d_a}" if d_a == d_b else f"{d_a},{d_b}"
    out = [f"dim={dim} radical={sc.radical}"]
    if d_a == d_b and sc.state.coeff == Matrix.identity(d_a):
        out.append("state = identity")
    else:
        out.append(f"state = {_fmt_grid(sc.state.coeff)}")
    out += _side_lines("A", sc.alice_contexts, "a")
    out += _side_lines("B", sc.bob_contexts, "b")
    return "\n".join(out) + "\n"


# -- builtins ---------------------------------------------------------------

BUILTINS = {
    "peres24": "peres24.rays",
    "peres33": "peres33.rays",
    "cabello18": "cabello18.rays",
    "magic-square-scenario": "magic-square.scenario",
    "qutrit-scenario": "qutrit.scenario",
}

_cache: dict[str, RaySet | Scenario] = {}


def builtin(name: str) -> RaySet | Scenario:
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    if name not in _cache:
        text = resources.files("bpqs").joinpath("data", BUILTINS[name]).read_text(encoding="utf-8")
        _cache[name] = parse_catalog(text, name)
    return _cache[name]


def load(source: str) -> RaySet | Scenario:
    """Load a builtin by name or a catalog file by path."""
    if source in BUILTINS:
        return builtin(source)
    path = Path(source)
    if not path.is_file():
        raise FileNotFoundError(f"no builtin or file named {source!r}")
    return parse_catalog(path.read_text(encoding="utf-8"), path.stem)
