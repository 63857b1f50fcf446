"""Input documents and report shapes shared by the CLI and the suite runner."""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, root_validator, validator
from typing_extensions import TypedDict

from eqbn.catalogs import BUILTIN_GROUPS, get_catalog, get_group
from eqbn.cover_twist_lab import BaseGraph, CoverSpec, DiscreteBundleOperator
from eqbn.exact_linalg import Matrix
from eqbn.jet_calculus import BUILTIN_SYMBOLS, Symbol, get_symbol
from eqbn.orbifold_index import (
    BLOCK_TYPES,
    MonodromyDatum,
    OrbifoldData,
    RamificationProfile,
    SurfaceBundleData,
)
from eqbn.rep_theory import FiniteGroup, IrreducibleCatalog, Representation
from eqbn.scalars import KINDS, RATIONAL, parse_scalar

COMMANDS = (
    "wendl-certify",
    "orbifold-index",
    "rep-decompose",
    "cover-verify",
    "jet-check",
    "suite",
)


def parse_matrix(raw: List[List[Any]], kind: str = RATIONAL) -> Matrix:
    """Rows of JSON scalars (see :func:`eqbn.scalars.parse_scalar`)."""
    rows = [[parse_scalar(x, kind) for x in row] for row in raw]
    return Matrix(rows, kind, len(rows[0]) if rows else 0)


class JobSpec(BaseModel):
    """A single CLI invocation."""

    command: str
    document: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0, ge=0)
    out: Optional[str] = None
    format: str = "json"

    @validator("command")
    def _known_command(cls, value: str) -> str:
        if value not in COMMANDS:
            raise ValueError(f"Unknown command {value!r}; expected one of {COMMANDS}")
        return value

    @validator("format")
    def _known_format(cls, value: str) -> str:
        if value not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        return value


class RepresentationInput(BaseModel):
    degree: int = Field(..., ge=1)
    # One matrix per group element, in element order.
    matrices: List[List[List[Any]]]
    kind: str = RATIONAL
    name: str = ""

    @validator("kind")
    def _known_kind(cls, value: str) -> str:
        if value not in KINDS:
            raise ValueError(f"Unknown scalar kind {value!r}")
        return value

    def build(self, group: FiniteGroup) -> Representation:
        matrices = tuple(parse_matrix(m, self.kind) for m in self.matrices)
        return Representation(group, self.degree, matrices, self.name)


class RepDecomposeJob(BaseModel):
    """A built-in ``group`` or an explicit multiplication ``table``."""

    group: Optional[str] = None
    order: Optional[int] = None
    table: Optional[List[List[int]]] = None
    reps: List[RepresentationInput] = Field(default_factory=list)
    regular: bool = False
    subgroup: Optional[List[int]] = None

    @root_validator(skip_on_failure=True)
    def _one_group(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if (values.get("group") is None) == (values.get("table") is None):
            raise ValueError("Give exactly one of 'group' or 'table'")
        name = values.get("group")
        if name is not None and name not in BUILTIN_GROUPS:
            raise ValueError(f"Unknown group {name!r}; expected one of {BUILTIN_GROUPS}")
        table = values.get("table")
        if table is not None and values.get("order") not in (None, len(table)):
            raise ValueError("'order' does not match the table size")
        return values

    def build_group(self) -> FiniteGroup:
        if self.group is not None:
            return get_group(self.group)
        return FiniteGroup.from_table(self.table or [])


class CoverInput(BaseModel):
    group: str
    phi: List[int]
    subgroup: Optional[List[int]] = None

    @validator("group")
    def _builtin(cls, value: str) -> str:
        if value not in BUILTIN_GROUPS:
            raise ValueError(f"Unknown group {value!r}; expected one of {BUILTIN_GROUPS}")
        return value

    def build(self) -> CoverSpec:
        group = get_group(self.group)
        subgroup = self.subgroup if self.subgroup is not None else [group.identity]
        return CoverSpec(group, tuple(self.phi), tuple(sorted(subgroup)))


class CoverJob(BaseModel):
    vertices: int = Field(..., ge=1)
    edges: List[List[int]]
    tree: List[int]
    rank: int = Field(..., ge=1)
    # Per edge the pair [A_e, B_e] of rank×rank matrices.
    coeffs: List[List[List[List[Any]]]]
    kind: str = RATIONAL
    cover: CoverInput
    petri_edges: Optional[List[int]] = None

    @validator("edges", each_item=True)
    def _edge_pairs(cls, value: List[int]) -> List[int]:
        if len(value) != 2:
            raise ValueError("Edges are [tail, head] pairs")
        return value

    @validator("coeffs", each_item=True)
    def _coefficient_pairs(cls, value: List[Any]) -> List[Any]:
        if len(value) != 2:
            raise ValueError("Each edge carries a pair [A, B]")
        return value

    def build(self) -> DiscreteBundleOperator:
        graph = BaseGraph(self.vertices, tuple(tuple(e) for e in self.edges), tuple(self.tree))
        coeffs = tuple(
            (parse_matrix(a, self.kind), parse_matrix(b, self.kind)) for a, b in self.coeffs
        )
        return DiscreteBundleOperator(graph, self.rank, coeffs)

    def catalog(self) -> IrreducibleCatalog:
        return get_catalog(self.cover.group)


class SymbolJob(BaseModel):
    """An explicit symbol or one of the built-in names."""

    builtin: Optional[str] = None
    n: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=1)
    r_e: Optional[int] = Field(None, alias="rE", ge=1)
    r_f: Optional[int] = Field(None, alias="rF", ge=1)
    # Keys are multi-indices written "1,0"; values are rF×rE matrices.
    coeffs: Dict[str, List[List[Any]]] = Field(default_factory=dict)
    ell: int = Field(3, ge=0)

    class Config:
        allow_population_by_field_name = True

    @root_validator(skip_on_failure=True)
    def _symbol_source(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        builtin = values.get("builtin")
        if builtin is not None:
            if builtin not in BUILTIN_SYMBOLS:
                raise ValueError(f"Unknown symbol {builtin!r}; expected one of {tuple(BUILTIN_SYMBOLS)}")
            return values
        missing = [f for f in ("n", "k", "r_e", "r_f") if values.get(f) is None]
        if missing or not values.get("coeffs"):
            raise ValueError(f"Explicit symbols need n, k, rE, rF and coeffs (missing {missing})")
        return values

    def build(self) -> Symbol:
        if self.builtin is not None:
            return get_symbol(self.builtin)
        coeffs = {}
        for key, raw in self.coeffs.items():
            index = tuple(int(x) for x in key.strip("()[] ").split(","))
            coeffs[index] = parse_matrix(raw)
        symbol = Symbol.from_mapping(self.n or 0, self.k or 0, coeffs, "input")
        if (symbol.r_e, symbol.r_f) != (self.r_e, self.r_f):
            raise ValueError(f"Coefficient shape {symbol.r_f}x{symbol.r_e} differs from rF x rE")
        return symbol


class WendlJob(BaseModel):
    """Kernel element (b, b'), a basis element index, or a seeded random one."""

    d: int = Field(..., ge=1)
    ell: Optional[int] = Field(None, ge=0)
    b: Optional[List[Any]] = None
    bp: Optional[List[Any]] = None
    basis_index: Optional[int] = Field(None, ge=0)

    @root_validator(skip_on_failure=True)
    def _element_source(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        b, bp = values.get("b"), values.get("bp")
        if (b is None) != (bp is None):
            raise ValueError("Give both b and bp or neither")
        if b is not None and values.get("basis_index") is not None:
            raise ValueError("Give either (b, bp) or basis_index")
        d = values["d"]
        if b is not None and (len(b) != d + 1 or len(bp) != d + 1):
            raise ValueError(f"b and bp need d + 1 = {d + 1} entries")
        index = values.get("basis_index")
        if index is not None and index >= 2 * d:
            raise ValueError(f"basis_index must be below 2d = {2 * d}")
        return values


class BlockInput(BaseModel):
    type: str
    w: int = 0

    @validator("type")
    def _known_block(cls, value: str) -> str:
        if value not in BLOCK_TYPES:
            raise ValueError(f"Unknown block type {value!r}; expected one of {BLOCK_TYPES}")
        return value


class OrbifoldPointInput(BaseModel):
    k: int = Field(..., ge=2)
    blocks: List[BlockInput] = Field(default_factory=list)
    matrix: Optional[List[List[Any]]] = None

    @root_validator(skip_on_failure=True)
    def _some_monodromy(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if not values.get("blocks") and values.get("matrix") is None:
            raise ValueError("A point needs monodromy blocks or a matrix")
        return values

    def build(self) -> MonodromyDatum:
        if self.matrix is not None:
            datum = MonodromyDatum.from_matrix(self.k, parse_matrix(self.matrix))
            if self.blocks:
                return MonodromyDatum(
                    self.k, MonodromyDatum.from_blocks(self.k, self._pairs()).blocks, datum.matrix
                )
            return datum
        return MonodromyDatum.from_blocks(self.k, self._pairs())

    def _pairs(self) -> List[Any]:
        return [(block.type, block.w) for block in self.blocks]


class CoverProfileInput(BaseModel):
    degree: int = Field(..., ge=1)
    branch: List[List[int]]
    base_genus: int = Field(0, ge=0)

    def build(self) -> RamificationProfile:
        return RamificationProfile(self.degree, tuple(tuple(p) for p in self.branch), self.base_genus)


class LedgerInput(BaseModel):
    s: int = Field(..., ge=0)
    k: List[int]
    d: List[int]
    i: List[int]


class OrbifoldJob(BaseModel):
    genus: int = Field(..., ge=0)
    rank: int = Field(..., alias="rkE", ge=0)
    degree: int = Field(..., alias="degE")
    n: int = Field(3, ge=3)
    points: List[OrbifoldPointInput] = Field(default_factory=list)
    cover: Optional[CoverProfileInput] = None
    ledger: Optional[LedgerInput] = None
    c1_pairing: Optional[int] = None
    z: int = Field(0, ge=0)

    class Config:
        allow_population_by_field_name = True

    def surface(self) -> SurfaceBundleData:
        return SurfaceBundleData(self.genus, self.rank, self.degree, self.n)

    def orbifold(self) -> OrbifoldData:
        return OrbifoldData.from_multiplicities([p.k for p in self.points])


# Report shapes


class ErrorDetail(TypedDict):
    type: str
    """Exception class name."""
    detail: Any
    """Message, or the list of validation errors."""


class ErrorReport(TypedDict):
    error: ErrorDetail


class Report(TypedDict):
    """Result of one command."""

    command: str
    """The command that produced the report."""
    version: str
    """Package version."""
    seed: int
    config_hash: str
    """Hash of the mathematical constants in effect."""
    default_config_hash: str
    """Hash of the shipped defaults."""
    results: Dict[str, Any]
    """Command-specific results."""
    passed: bool
    """Whether every asserted check passed."""
    timing_seconds: float
    """Wall time; excluded from determinism comparisons."""


class CriterionResult(TypedDict):
    id: int
    name: str
    status: str
    """'pass' or 'fail'."""
    measured: Dict[str, Any]


class SuiteJob(BaseModel):
    criteria: Optional[List[int]] = None
    workers: Optional[int] = Field(None, ge=1)
