import math
from typing import Annotated, Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_serializer,
    field_validator,
    model_validator,
)

from config import LIPWIDTH_CONFIG


def _as_float_array(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.flags.writeable = False
    return arr


# numpy array field that serializes as nested lists
FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

class Norm(FrozenModel):
    kind: Literal["lp", "sup_grid"] = Field(
        description="lp for the usual finite-dimensional norms, sup_grid for functions sampled on a grid"
    )
    p: Optional[float] = Field(
        default=None,
        description="Exponent of the lp norm, at least 1 or inf"
    )
    dimension: int = Field(
        ge=1,
        description="Vector length: the lp dimension or the number of grid nodes"
    )
    grid_axes: Optional[List[List[float]]] = Field(
        default=None,
        description="Strictly increasing sample points in [0, 1], one list per axis"
    )

    class Config:
        json_schema_extra = {
            "example": {"kind": "lp", "p": "inf", "dimension": 3}
        }

    @field_validator("p", mode="before")
    @classmethod
    def _parse_inf(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
            return math.inf
        return value

    @field_serializer("p")
    def _dump_p(self, p):
        if p is not None and math.isinf(p):
            return "inf"
        return p

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "lp":
            if self.p is None or not self.p >= 1:
                raise ValueError(f"lp norm needs p >= 1 or inf, got {self.p}")
            return self
        if not self.grid_axes:
            raise ValueError("sup_grid norm needs a nonempty grid")
        size = 1
        for axis in self.grid_axes:
            values = np.asarray(axis, dtype=float)
            if values.size == 0:
                raise ValueError("sup_grid axis is empty")
            if np.any(np.diff(values) <= 0):
                raise ValueError("sup_grid axis must be strictly increasing")
            if values[0] < 0 or values[-1] > 1:
                raise ValueError("sup_grid axis must lie in [0, 1]")
            size *= values.size
        if size != self.dimension:
            raise ValueError(f"sup_grid has {size} nodes but dimension is {self.dimension}")
        return self

    @classmethod
    def lp(cls, p: float, dimension: int) -> "Norm":
        return cls(kind="lp", p=p, dimension=dimension)

    @classmethod
    def uniform_grid(cls, points_per_axis: int, d: int = 1) -> "Norm":
        if points_per_axis < 2:
            raise ValueError("a uniform grid needs at least 2 points per axis")
        axis = np.linspace(0.0, 1.0, points_per_axis).tolist()
        return cls(kind="sup_grid", dimension=points_per_axis ** d, grid_axes=[axis] * d)

    @property
    def is_sup(self) -> bool:
        return self.kind == "sup_grid" or math.isinf(self.p)

    def measure(self, diff: np.ndarray) -> np.ndarray:
        """Norm of each vector along the last axis."""
        diff = np.asarray(diff, dtype=float)
        if self.is_sup:
            return np.max(np.abs(diff), axis=-1)
        if self.p == 1:
            return np.sum(np.abs(diff), axis=-1)
        return np.linalg.norm(diff, ord=self.p, axis=-1)

    def grid_nodes(self) -> np.ndarray:
        """Grid nodes as an (M, d) array in row-major order of the axes."""
        if self.kind != "sup_grid":
            raise ValueError("only sup_grid norms have grid nodes")
        mesh = np.meshgrid(*[np.asarray(a) for a in self.grid_axes], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def grid_spacing(self) -> float:
        if self.kind != "sup_grid":
            return 0.0
        gaps = [np.max(np.diff(a)) if len(a) > 1 else 0.0 for a in self.grid_axes]
        return float(max(gaps))


class PointCloudSet(FrozenModel):
    points: FloatArray = Field(
        description="One point per row, all of the norm's dimension"
    )
    norm: Norm
    label: str = ""
    resolution: float = Field(
        default=0.0,
        ge=0.0,
        description="Sup distance from the represented compact set to these points"
    )

    @field_validator("points")
    @classmethod
    def _dedup(cls, points: np.ndarray) -> np.ndarray:
        if points.ndim != 2 or points.shape[0] == 0:
            raise ValueError("a point cloud needs a nonempty 2-d array of points")
        if not np.all(np.isfinite(points)):
            raise ValueError("point cloud contains non-finite values")
        seen = set()
        keep = []
        for i, row in enumerate(points):
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                keep.append(i)
        out = np.array(points[keep], dtype=float)
        out.flags.writeable = False
        return out

    @model_validator(mode="after")
    def _check_dimension(self):
        if self.points.shape[1] != self.norm.dimension:
            raise ValueError(
                f"points have dimension {self.points.shape[1]}, norm expects {self.norm.dimension}"
            )
        return self

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])


class SigmaExampleSet(FrozenModel):
    J: int = Field(ge=1, description="Truncation: number of scaled basis vectors")
    includes_zero: Literal[True] = True

    @property
    def sigmas(self) -> np.ndarray:
        j = np.arange(1, self.J + 1, dtype=float)
        return 1.0 / np.log2(j + 1.0)


class ChebyshevResult(FrozenModel):
    radius: float
    center: FloatArray
    lower: float = Field(description="Certified lower bound, half the diameter")
    upper: float
    exact: bool


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------

class Activation(FrozenModel):
    kind: Literal["relu", "identity", "sigmoidal"]
    L: float = Field(default=1.0, gt=0, description="Lipschitz constant claimed for sigmoidal")

    @model_validator(mode="after")
    def _check_sigmoidal(self):
        if self.kind != "sigmoidal":
            return self
        t = np.linspace(-20.0, 20.0, LIPWIDTH_CONFIG["activation_check_points"])
        s = np.tanh(t)
        if np.max(np.abs(s)) > 1.0:
            raise ValueError("sigmoidal activation leaves [-1, 1]")
        slope = np.max(np.abs(np.diff(s)) / np.diff(t))
        if slope > self.L * (1 + 1e-12):
            raise ValueError(f"tanh is not {self.L}-Lipschitz (sampled slope {slope:.6f})")
        return self

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "relu":
            return np.maximum(z, 0.0)
        if self.kind == "identity":
            return z
        return np.tanh(z)


class AffineLayer(FrozenModel):
    matrix: FloatArray
    bias: FloatArray

    @model_validator(mode="after")
    def _check_shape(self):
        if self.matrix.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("layer needs a 2-d matrix and a 1-d bias")
        if self.matrix.shape[0] != self.bias.shape[0]:
            raise ValueError(
                f"matrix has {self.matrix.shape[0]} rows but bias has {self.bias.shape[0]} entries"
            )
        return self


class FeedForwardNet(FrozenModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    d: int = Field(ge=1, description="Input dimension")
    W: int = Field(ge=1, description="Width of every hidden layer")
    n: int = Field(ge=1, description="Depth: number of activation stages")
    layers: List[AffineLayer] = Field(description="A^(0) .. A^(n)")
    channel_activations: List[List[Activation]] = Field(
        alias="activation",
        description="Per stage, per channel activations applied after A^(0) .. A^(n-1)"
    )
    param_bound: float = Field(gt=0, description="Declared bound w on every parameter")

    @model_validator(mode="after")
    def _check_chain(self):
        if len(self.layers) != self.n + 1:
            raise ValueError(f"depth {self.n} needs {self.n + 1} layers, got {len(self.layers)}")
        for ell, layer in enumerate(self.layers):
            rows = 1 if ell == self.n else self.W
            cols = self.d if ell == 0 else self.W
            if layer.matrix.shape != (rows, cols):
                raise ValueError(f"layer {ell} has shape {layer.matrix.shape}, expected {(rows, cols)}")
        if len(self.channel_activations) != self.n:
            raise ValueError(f"need {self.n} activation stages, got {len(self.channel_activations)}")
        for acts in self.channel_activations:
            if len(acts) != self.W:
                raise ValueError(f"each activation stage needs {self.W} channels")
        largest = max(
            max(np.max(np.abs(layer.matrix)), np.max(np.abs(layer.bias))) for layer in self.layers
        )
        if largest > self.param_bound:
            raise ValueError(f"parameter of size {largest} exceeds the bound {self.param_bound}")
        return self


class ParamVector(FrozenModel):
    values: FloatArray
    bound: float = Field(gt=0)
    layout: Tuple[int, int, int] = Field(description="(d, W, n)")

    @staticmethod
    def expected_length(d: int, W: int, n: int) -> int:
        return W * d + W + (n - 1) * (W * W + W) + W + 1

    @model_validator(mode="after")
    def _check(self):
        if self.values.ndim != 1:
            raise ValueError("parameter vector must be 1-d")
        expected = self.expected_length(*self.layout)
        if self.values.shape[0] != expected:
            raise ValueError(f"layout {self.layout} needs {expected} parameters, got {self.values.shape[0]}")
        if self.values.size and np.max(np.abs(self.values)) > self.bound:
            raise ValueError(f"parameter exceeds the bound {self.bound}")
        return self


# ---------------------------------------------------------------------------
# lipbounds
# ---------------------------------------------------------------------------

Regime = Literal["deep_sigmoidal", "deep_relu", "shallow_sigmoidal", "shallow_relu"]


class BoundFamily(FrozenModel):
    kind: Literal["constant", "polynomial", "exponential"]
    C: float = Field(gt=0)
    delta: float = Field(default=0.0, ge=0, description="Polynomial exponent in C n^delta")
    c: float = Field(default=0.0, ge=0, description="Rate in C 2^{c n^nu}")
    nu: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "polynomial" and self.delta <= 0:
            raise ValueError("polynomial bound family needs delta > 0")
        if self.kind == "exponential" and self.c <= 0:
            raise ValueError("exponential bound family needs c > 0")
        if self.value(1) < 1:
            raise ValueError("bound families must satisfy w(1) >= 1")
        return self

    def log2_value(self, n: float) -> float:
        if self.kind == "constant":
            return math.log2(self.C)
        if self.kind == "polynomial":
            return math.log2(self.C) + self.delta * math.log2(n)
        return math.log2(self.C) + self.c * n ** self.nu

    def value(self, n: float) -> float:
        try:
            return 2.0 ** self.log2_value(n)
        except OverflowError:
            return math.inf


class LipschitzCertificate(FrozenModel):
    value: float = Field(gt=0, description="Bound from the exact recursion, times c0")
    recursion_trace: List[float] = Field(description="C_j or D_j for j = 0 .. n")
    closed_form: float = Field(gt=0)
    regime: Regime
    hypothesis_holds: bool = Field(
        default=True,
        description="Whether the standing assumptions of the closed form are met"
    )
    params: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        if not self.hypothesis_holds:
            return self
        if self.value > self.closed_form * (1 + 1e-12):
            raise ValueError(f"recursion value {self.value} exceeds closed form {self.closed_form}")
        trace = np.asarray(self.recursion_trace)
        if np.any(np.diff(trace) < 0):
            raise ValueError("recursion trace must be nondecreasing")
        return self


class PhiGamma(FrozenModel):
    phi: float
    log2_gamma: float
    gamma: float
    growth: "GrowthFunction"
    regime: Literal["deep", "shallow"]


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------

class Cover(FrozenModel):
    centers: FloatArray
    radius: float = Field(gt=0)
    verified: bool = False

    @property
    def size(self) -> int:
        return int(self.centers.shape[0])


class EntropyBracket(FrozenModel):
    n: int = Field(ge=0)
    lower: float = Field(ge=0)
    upper: float = Field(ge=0)
    method: str = Field(description="exact, exact-candidates, greedy or trivial")

    @model_validator(mode="after")
    def _check(self):
        if self.lower > self.upper * (1 + 1e-12) + 1e-15:
            raise ValueError(f"lower {self.lower} above upper {self.upper} at n={self.n}")
        return self


class EntropyProfile(FrozenModel):
    label: str = ""
    brackets: List[EntropyBracket]

    @model_validator(mode="after")
    def _check(self):
        ns = [b.n for b in self.brackets]
        if ns != sorted(set(ns)):
            raise ValueError("entropy profile indices must be strictly increasing")
        uppers = [b.upper for b in self.brackets]
        if any(later > earlier for earlier, later in zip(uppers, uppers[1:])):
            raise ValueError("entropy upper bounds must be nonincreasing")
        return self

    def lower_at(self, k: int) -> Optional[float]:
        """Best lower bound on eps_k: any later index's lower bound also applies."""
        values = [b.lower for b in self.brackets if b.n >= k]
        return max(values) if values else None

    def upper_at(self, k: int) -> Optional[float]:
        values = [b.upper for b in self.brackets if b.n <= k]
        return min(values) if values else None

    @property
    def max_index(self) -> int:
        return max(b.n for b in self.brackets) if self.brackets else -1


# ---------------------------------------------------------------------------
# widths
# ---------------------------------------------------------------------------

class LipschitzParametrization(FrozenModel):
    param_dim: int = Field(ge=1)
    radius: float = Field(gt=0, description="Radius r of the l_inf parameter ball")
    lipschitz_constant: float = Field(ge=0, description="Claimed constant gamma / r")
    map: Callable[[np.ndarray], np.ndarray] = Field(exclude=True)
    norm: Norm
    batched: bool = Field(default=False, description="map accepts a (B, n) batch")
    description: str = ""
    id: str = "custom"

    @model_validator(mode="after")
    def _spot_check(self):
        rng = np.random.default_rng(LIPWIDTH_CONFIG["seed"])
        pairs = LIPWIDTH_CONFIG["spot_check_pairs"]
        r = self.radius
        y = rng.uniform(-r, r, size=(pairs, self.param_dim))
        step = rng.uniform(-1e-3 * r, 1e-3 * r, size=(pairs, self.param_dim))
        y2 = rng.uniform(-r, r, size=(pairs, self.param_dim))
        half = pairs // 2
        y2[:half] = np.clip(y[:half] + step[:half], -r, r)
        gaps = np.max(np.abs(y - y2), axis=1)
        ok = gaps > 0
        ratios = self.norm.measure(self.images(y[ok]) - self.images(y2[ok])) / gaps[ok]
        if ratios.size and ratios.max() > self.lipschitz_constant * (1 + 1e-9) + 1e-12:
            raise ValueError(
                f"sampled Lipschitz ratio {ratios.max():.6g} exceeds the claimed {self.lipschitz_constant}"
            )
        return self

    @property
    def gamma(self) -> float:
        return self.lipschitz_constant * self.radius

    def images(self, ys: np.ndarray) -> np.ndarray:
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        if self.batched:
            return np.atleast_2d(np.asarray(self.map(ys), dtype=float))
        return np.stack([np.asarray(self.map(y), dtype=float).ravel() for y in ys])


class AffineFamilySpec(FrozenModel):
    """JSON form of a custom family y -> offset + sum_i y_i basis_i on B(radius)."""
    offset: List[float]
    basis: List[List[float]] = Field(description="One row per parameter, each of the set's dimension")
    radius: float = Field(default=1.0, gt=0)
    lipschitz_constant: Optional[float] = Field(
        default=None,
        ge=0,
        description="Claimed constant; sum_i ||basis_i|| when missing"
    )
    id: str = "custom"

    class Config:
        json_schema_extra = {
            "example": {"offset": [0.5], "basis": [[0.5]], "radius": 1.0, "id": "segment"}
        }


class WidthEstimate(FrozenModel):
    n: int
    gamma: float
    upper: float = Field(description="Certified upper bound: raw plus gamma * delta")
    raw: float = Field(description="Largest grid distance from the set to the image")
    delta: float
    witness: str
    grid_size: int = 0


# ---------------------------------------------------------------------------
# carl
# ---------------------------------------------------------------------------

class RateFunction(FrozenModel):
    kind: Literal["polylog", "loginv", "expo"]
    alpha: float = Field(default=0.0, description="Power decay n^-alpha or [log2 n]^-alpha")
    beta: float = Field(default=0.0, description="Log power in [log2 n]^beta n^-alpha")
    c: float = Field(default=1.0, description="Rate in 2^{-c n^a [log2 n]^b}")
    a: float = 1.0
    b: float = 0.0
    scale: float = Field(default=1.0, gt=0)
    up_to_constants: bool = True

    class Config:
        json_schema_extra = {
            "example": {"kind": "polylog", "alpha": 1.0, "beta": 0.0}
        }

    @model_validator(mode="after")
    def _check(self):
        if self.kind in ("polylog", "loginv") and self.alpha <= 0:
            raise ValueError(f"{self.kind} rate needs alpha > 0")
        if self.kind == "expo" and (self.c <= 0 or self.a <= 0):
            raise ValueError("expo rate needs c > 0 and a > 0")
        return self

    def log2_value(self, n: float) -> float:
        if n <= 1:
            raise ValueError(f"rates are evaluated for n > 1, got {n}")
        lg = math.log2(n)
        base = math.log2(self.scale)
        if self.kind == "polylog":
            return base + self.beta * math.log2(lg) - self.alpha * lg
        if self.kind == "loginv":
            return base - self.alpha * math.log2(lg)
        return base - self.c * n ** self.a * lg ** self.b

    def value(self, n: float) -> float:
        return 2.0 ** self.log2_value(n)

    def n0(self) -> float:
        """Index from which the rate is monotonically decreasing."""
        if self.kind == "polylog" and self.beta > 0:
            return max(2.0, math.exp(self.beta / self.alpha))
        if self.kind == "expo" and self.b < 0:
            return max(2.0, math.exp(-self.b / self.a))
        return 2.0

    def describe(self) -> str:
        if self.kind == "polylog":
            return f"[log2 n]^{self.beta:g} n^-{self.alpha:g}"
        if self.kind == "loginv":
            return f"[log2 n]^-{self.alpha:g}"
        return f"2^(-{self.c:g} n^{self.a:g} [log2 n]^{self.b:g})"


class GrowthFunction(FrozenModel):
    kind: Literal["const", "linear", "nlogn", "power", "tabulated"]
    c: float = Field(default=1.0, gt=0)
    p: float = Field(default=0.0, ge=0)
    q: float = 0.0
    values: Optional[List[float]] = Field(
        default=None,
        description="phi(1), phi(2), ... for the tabulated kind"
    )

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "tabulated":
            if not self.values:
                raise ValueError("tabulated growth needs values")
            if any(v < 0 for v in self.values):
                raise ValueError("growth values must be nonnegative")
        return self

    @property
    def exponents(self) -> Tuple[float, float]:
        """(p, q) with phi(n) ~ n^p [log2 n]^q."""
        if self.kind == "const":
            return (0.0, 0.0)
        if self.kind == "linear":
            return (1.0, 0.0)
        if self.kind == "nlogn":
            return (1.0, 1.0)
        if self.kind == "power":
            return (self.p, self.q)
        raise ValueError("tabulated growth has no symbolic exponents")

    @property
    def log_hypothesis(self) -> bool:
        """Whether phi(n) >= c log2 n for some fixed c > 0."""
        if self.kind == "tabulated":
            return all(v > 0 for v in self.values[1:])
        p, q = self.exponents
        return p > 0 or (p == 0 and q >= 1)

    def value(self, n: float) -> float:
        if self.kind == "tabulated":
            if n != int(n) or not 1 <= n <= len(self.values):
                raise ValueError(f"tabulated growth is defined on 1..{len(self.values)}, got {n}")
            return float(self.values[int(n) - 1])
        p, q = self.exponents
        if self.kind == "const":
            return self.c
        lg = math.log2(n)
        if q != 0 and lg <= 0:
            return 0.0
        return self.c * n ** p * (lg ** q if q != 0 else 1.0)

    def describe(self) -> str:
        if self.kind == "tabulated":
            return f"tabulated({len(self.values)})"
        if self.kind == "const":
            return f"{self.c:g}"
        p, q = self.exponents
        return f"{self.c:g} n^{p:g} [log2 n]^{q:g}"


class CarlIndex(FrozenModel):
    value: float
    index: int
    degenerate: bool


class CarlViolation(FrozenModel):
    m: int
    gamma: float
    width_upper: float
    k: int
    delta: float
    entropy_lower: float


class CarlReport(FrozenModel):
    checked: int
    violations: List[CarlViolation]
    partial: bool

    @property
    def ok(self) -> bool:
        return not self.violations


class DoublingReport(FrozenModel):
    sup: float
    argmax: int
    classification: Literal["finite", "infinite", "unknown"]


class RatioBound(FrozenModel):
    value: Optional[float]
    ratio: float
    degenerate: bool


class ChainResult(FrozenModel):
    entropy_index: int
    gamma: Optional[float]
    degenerate: bool


# ---------------------------------------------------------------------------
# takagi
# ---------------------------------------------------------------------------

class TakagiSpec(FrozenModel):
    coefficients: List[float] = Field(default_factory=list, description="c_1 .. c_n")
    lam: Optional[float] = Field(default=None, description="lambda form: c_k = lambda^-k")
    n_terms: Optional[int] = None
    in_class: bool = Field(default=False, description="sum |c_k| <= 1")

    @model_validator(mode="before")
    @classmethod
    def _expand(cls, data):
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        lam = data.get("lam")
        if lam is not None:
            if abs(lam) <= 1:
                raise ValueError(f"lambda form needs |lambda| > 1, got {lam}")
            n_terms = data.get("n_terms")
            if n_terms is None or n_terms < 1:
                raise ValueError("lambda form needs n_terms >= 1")
            expanded = [lam ** (-k) for k in range(1, n_terms + 1)]
            given = data.get("coefficients")
            if given and not np.allclose(given, expanded, rtol=0, atol=1e-15):
                raise ValueError("coefficients disagree with the lambda form")
            data["coefficients"] = expanded
        coefficients = data.get("coefficients") or []
        data["n_terms"] = len(coefficients)
        flag = float(np.sum(np.abs(coefficients))) <= 1.0
        if "in_class" in data and data["in_class"] is not None and bool(data["in_class"]) != flag:
            raise ValueError("in_class flag disagrees with sum |c_k|")
        data["in_class"] = flag
        return data


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

class CorpusEntry(FrozenModel):
    cloud: PointCloudSet
    witnesses: List[LipschitzParametrization] = Field(
        default_factory=list,
        description="Unit-ball parametrizations whose widths bound the cloud"
    )
    n_max: int = Field(ge=0, description="Largest entropy index computed for the cloud")
    gamma_factors: List[float] = Field(
        default_factory=lambda: [0.25, 0.5, 1.0],
        description="Multiples of each witness constant swept by the width profile"
    )
    delta: float = Field(gt=0, description="l_inf fineness of the width search grids")

    @property
    def label(self) -> str:
        return self.cloud.label


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

class CriterionResult(FrozenModel):
    id: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


class SuiteReport(FrozenModel):
    quick: bool
    criteria: List[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)


PhiGamma.model_rebuild()
