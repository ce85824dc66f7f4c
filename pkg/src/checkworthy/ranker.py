"""L2-regularized binary logistic regression, trained by limited-memory BFGS.

The objective is

    f(w, b) = mean_i softplus(z_i) - y_i * z_i   + (lambda / 2) * ||w||^2,
    z_i = x_i . w + b

with the bias left out of the penalty.  Softplus is evaluated through
``np.logaddexp(0, z)`` so large scores cannot overflow.  Weights start at
zero; with lambda > 0 the objective is strictly convex, so the optimizer
converges to the unique optimum no matter the path, and identical inputs
produce bitwise-identical models.

The optimizer is a standard two-loop L-BFGS (memory 10) with Armijo
backtracking.  Curvature pairs with non-positive s.y are skipped and a
failed line search falls back to steepest descent once before giving up,
which only happens within float precision of the optimum.

Trained models serialize to a line-oriented text file that carries the
feature layout (group names and widths) and, optionally, the training
standardizer, so scoring refuses feature matrices that were assembled
with a different configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from checkworthy.corpus import ClaimRecord
from checkworthy.features import (
    FeatureGroup,
    FeatureMatrix,
    FeatureVector,
    GroupSegment,
    Standardizer,
)

MODEL_FORMAT = "checkworthy-lr v1"

_ARMIJO_C1 = 1e-4
_BACKTRACK_FACTOR = 0.5
_MAX_BACKTRACKS = 60
_LBFGS_MEMORY = 10


class RankerError(ValueError):
    """Training, scoring, or model serialization failed."""


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings.  ``lam`` is the L2 strength on the weights.

    ``seed`` is accepted for interface stability but has no effect:
    initialization is deterministic zeros.
    """

    lam: float = 1.0
    tolerance: float = 1e-8
    max_iterations: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.lam >= 0.0):
            raise RankerError(f"lam must be >= 0, got {self.lam}")
        if not (self.tolerance > 0.0):
            raise RankerError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise RankerError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class LRModel:
    """A trained model: weights, bias, and how it expects features laid out."""

    weights: np.ndarray
    bias: float
    lam: float
    iterations: int
    objective: float
    converged: bool
    layout: tuple[GroupSegment, ...] | None = None
    standardizer: Standardizer | None = None

    def __post_init__(self) -> None:
        if self.weights.ndim != 1:
            raise RankerError("weights must be a 1-D vector")
        if self.layout is not None:
            width = sum(seg.width for seg in self.layout)
            if width != self.weights.shape[0]:
                raise RankerError(
                    f"layout width {width} does not match {self.weights.shape[0]} weights"
                )
        if self.standardizer is not None and self.standardizer.width != self.weights.shape[0]:
            raise RankerError(
                f"standardizer width {self.standardizer.width} does not match "
                f"{self.weights.shape[0]} weights"
            )
        self.weights.setflags(write=False)

    @property
    def width(self) -> int:
        return self.weights.shape[0]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def objective_and_gradient(
    params: np.ndarray, X: np.ndarray, y: np.ndarray, lam: float
) -> tuple[float, np.ndarray]:
    """Regularized mean NLL and its gradient; params stacks (weights, bias)."""
    w = params[:-1]
    b = params[-1]
    z = X @ w + b
    f = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * (w @ w))
    residual = (_sigmoid(z) - y) / y.shape[0]
    grad_w = X.T @ residual + lam * w
    grad_b = residual.sum()
    return f, np.concatenate([grad_w, [grad_b]])


def _two_loop_direction(
    grad: np.ndarray,
    pairs: Sequence[tuple[np.ndarray, np.ndarray, float]],
) -> np.ndarray:
    """H^{-1} grad estimated from (s, y, 1/s.y) pairs, newest last."""
    q = grad.copy()
    alphas = []
    for s, yv, rho in reversed(pairs):
        alpha = rho * (s @ q)
        alphas.append(alpha)
        q -= alpha * yv
    if pairs:
        s, yv, _ = pairs[-1]
        q *= (s @ yv) / (yv @ yv)
    for (s, yv, rho), alpha in zip(pairs, reversed(alphas)):
        beta = rho * (yv @ q)
        q += (alpha - beta) * s
    return q


def _backtrack(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x: np.ndarray,
    f: float,
    grad: np.ndarray,
    direction: np.ndarray,
) -> tuple[np.ndarray, float, np.ndarray] | None:
    """Armijo line search along a descent direction; None when no step helps."""
    slope = float(grad @ direction)
    if not np.isfinite(slope) or slope >= 0.0:
        return None
    step = 1.0
    for _ in range(_MAX_BACKTRACKS):
        candidate = x + step * direction
        f_new, g_new = fun(candidate)
        if np.isfinite(f_new) and f_new <= f + _ARMIJO_C1 * step * slope:
            return candidate, f_new, g_new
        step *= _BACKTRACK_FACTOR
    return None


def _minimize(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    tolerance: float,
    max_iterations: int,
) -> tuple[np.ndarray, float, np.ndarray, int, bool]:
    x = x0
    f, grad = fun(x)
    pairs: list[tuple[np.ndarray, np.ndarray, float]] = []
    iterations = 0
    while iterations < max_iterations:
        if np.max(np.abs(grad)) <= tolerance:
            return x, f, grad, iterations, True
        direction = -_two_loop_direction(grad, pairs)
        result = _backtrack(fun, x, f, grad, direction)
        if result is None and pairs:
            # quasi-Newton direction failed; restart from steepest descent
            pairs.clear()
            result = _backtrack(fun, x, f, grad, -grad)
        if result is None:
            # no further float-representable progress
            break
        x_new, f_new, g_new = result
        s = x_new - x
        yv = g_new - grad
        curvature = float(s @ yv)
        if curvature > 1e-10 * float(np.linalg.norm(s)) * float(np.linalg.norm(yv)):
            pairs.append((s, yv, 1.0 / curvature))
            if len(pairs) > _LBFGS_MEMORY:
                pairs.pop(0)
        x, f, grad = x_new, f_new, g_new
        iterations += 1
    return x, f, grad, iterations, bool(np.max(np.abs(grad)) <= tolerance)


def train_lr(
    X: FeatureMatrix | np.ndarray,
    y: Sequence[int] | np.ndarray,
    cfg: TrainConfig = TrainConfig(),
    *,
    standardizer: Standardizer | None = None,
) -> LRModel:
    """Fit the model on rows of X with binary labels y.

    Accepts a FeatureMatrix (whose layout is recorded on the model) or a
    plain 2-D array.  Pass ``standardizer`` to embed the training-time
    standardization in the model so it travels with the model file.
    """
    layout = X.layout if isinstance(X, FeatureMatrix) else None
    values = X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    labels = np.asarray(y, dtype=np.float64)
    if values.ndim != 2:
        raise RankerError(f"feature matrix must be 2-D, got shape {values.shape}")
    if labels.shape != (values.shape[0],):
        raise RankerError(
            f"{values.shape[0]} feature rows but {labels.shape[0] if labels.ndim == 1 else labels.shape} labels"
        )
    if not np.isfinite(values).all():
        raise RankerError("feature matrix contains non-finite values")
    if not np.isin(labels, (0.0, 1.0)).all():
        raise RankerError("labels must be 0 or 1")
    if labels.min() == labels.max():
        raise RankerError("training labels are single-class; need both 0 and 1")

    def fun(params: np.ndarray) -> tuple[float, np.ndarray]:
        return objective_and_gradient(params, values, labels, cfg.lam)

    x0 = np.zeros(values.shape[1] + 1)
    params, f, _, iterations, converged = _minimize(
        fun, x0, cfg.tolerance, cfg.max_iterations
    )
    return LRModel(
        weights=params[:-1].copy(),
        bias=float(params[-1]),
        lam=cfg.lam,
        iterations=iterations,
        objective=f,
        converged=converged,
        layout=layout,
        standardizer=standardizer,
    )


def _check_layouts(
    model: LRModel, layout: tuple[GroupSegment, ...] | None, width: int
) -> None:
    if width != model.width:
        raise RankerError(f"model expects width {model.width}, features have {width}")
    if model.layout is not None and layout is not None and layout != model.layout:
        expected = " ".join(f"{s.group.value}:{s.width}" for s in model.layout)
        got = " ".join(f"{s.group.value}:{s.width}" for s in layout)
        raise RankerError(f"feature layout mismatch: model has [{expected}], got [{got}]")


def _margins(values: np.ndarray, model: LRModel) -> np.ndarray:
    # row-by-row dot products: BLAS picks different accumulation orders for
    # vector and matrix products, and single-row scoring must agree bitwise
    # with batch scoring
    return np.array([float(row @ model.weights) + model.bias for row in values])


def predict_score(model: LRModel, x: FeatureVector | np.ndarray) -> float:
    """Positive-class probability for one feature vector."""
    layout = x.layout if isinstance(x, FeatureVector) else None
    values = x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    if values.ndim != 1:
        raise RankerError(f"feature vector must be 1-D, got shape {values.shape}")
    _check_layouts(model, layout, values.shape[0])
    return float(_sigmoid(_margins(values[np.newaxis, :], model))[0])


def predict_scores(model: LRModel, X: FeatureMatrix | np.ndarray) -> np.ndarray:
    """Positive-class probabilities for every row of a feature matrix."""
    layout = X.layout if isinstance(X, FeatureMatrix) else None
    values = X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    if values.ndim != 2:
        raise RankerError(f"feature matrix must be 2-D, got shape {values.shape}")
    _check_layouts(model, layout, values.shape[1])
    return _sigmoid(_margins(values, model))


def rank_document(
    model: LRModel, rows: Sequence[tuple[ClaimRecord, FeatureVector | np.ndarray]]
) -> list[tuple[ClaimRecord, float]]:
    """Score one document's rows and sort them for fact-checking priority.

    Descending by score; ties broken by ascending line number so the
    ordering is deterministic.
    """
    doc_ids = {record.doc_id for record, _ in rows}
    if len(doc_ids) > 1:
        raise RankerError(f"rows span multiple documents: {sorted(doc_ids)}")
    scored = [(record, predict_score(model, x)) for record, x in rows]
    scored.sort(key=lambda pair: (-pair[1], pair[0].line_no))
    return scored


def _format_layout(layout: tuple[GroupSegment, ...]) -> str:
    return " ".join(f"{seg.group.value}:{seg.width}" for seg in layout)


def _parse_layout(text: str) -> tuple[GroupSegment, ...]:
    segments = []
    offset = 0
    for piece in text.split():
        name, _, width_text = piece.partition(":")
        try:
            group = FeatureGroup[name]
        except KeyError:
            raise RankerError(f"model file names unknown feature group {name!r}") from None
        try:
            width = int(width_text)
        except ValueError:
            raise RankerError(f"bad layout entry {piece!r}") from None
        segments.append(GroupSegment(group=group, offset=offset, width=width))
        offset += width
    if not segments:
        raise RankerError("model file has an empty layout")
    return tuple(segments)


def save_model(model: LRModel, path: str | Path) -> None:
    """Write the model as versioned, diff-friendly text (one weight per line)."""
    lines = [MODEL_FORMAT]
    lines.append(f"lambda\t{model.lam!r}")
    lines.append(f"iterations\t{model.iterations}")
    lines.append(f"objective\t{model.objective!r}")
    lines.append(f"converged\t{'true' if model.converged else 'false'}")
    if model.layout is not None:
        lines.append(f"layout\t{_format_layout(model.layout)}")
    lines.append(f"bias\t{model.bias!r}")
    lines.extend(f"w\t{float(v)!r}" for v in model.weights)
    if model.standardizer is not None:
        lines.extend(f"mean\t{float(v)!r}" for v in model.standardizer.mean)
        lines.extend(f"std\t{float(v)!r}" for v in model.standardizer.std)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LRModel:
    """Read a model file written by save_model, verifying its structure."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MODEL_FORMAT:
        raise RankerError(
            f"{path}: not a {MODEL_FORMAT!r} file"
            + (f" (header {lines[0]!r})" if lines else " (empty)")
        )
    scalars: dict[str, str] = {}
    weights: list[float] = []
    means: list[float] = []
    stds: list[float] = []
    for line_number, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        key, sep, value = line.partition("\t")
        if not sep:
            raise RankerError(f"{path} line {line_number}: expected key<TAB>value")
        if key in ("w", "mean", "std"):
            try:
                number = float(value)
            except ValueError:
                raise RankerError(
                    f"{path} line {line_number}: non-numeric {key} value {value!r}"
                ) from None
            {"w": weights, "mean": means, "std": stds}[key].append(number)
        elif key in ("lambda", "iterations", "objective", "converged", "layout", "bias"):
            if key in scalars:
                raise RankerError(f"{path} line {line_number}: duplicate {key}")
            scalars[key] = value
        else:
            raise RankerError(f"{path} line {line_number}: unknown key {key!r}")
    missing = [k for k in ("lambda", "iterations", "objective", "converged", "bias") if k not in scalars]
    if missing:
        raise RankerError(f"{path}: missing fields {missing}")
    if not weights:
        raise RankerError(f"{path}: no weight lines")
    if scalars["converged"] not in ("true", "false"):
        raise RankerError(f"{path}: converged must be true or false")
    layout = _parse_layout(scalars["layout"]) if "layout" in scalars else None
    standardizer = None
    if means or stds:
        if len(means) != len(weights) or len(stds) != len(weights):
            raise RankerError(
                f"{path}: standardizer block has {len(means)} means / {len(stds)} stds "
                f"for {len(weights)} weights"
            )
        standardizer = Standardizer(mean=np.array(means), std=np.array(stds))
    try:
        return LRModel(
            weights=np.array(weights),
            bias=float(scalars["bias"]),
            lam=float(scalars["lambda"]),
            iterations=int(scalars["iterations"]),
            objective=float(scalars["objective"]),
            converged=scalars["converged"] == "true",
            layout=layout,
            standardizer=standardizer,
        )
    except ValueError as exc:
        raise RankerError(f"{path}: {exc}") from None
