"""The four eigenvalue-based proximal classifiers.

All variants fit a pair of nonparallel hyperplanes, one proximal to each
class, from moment matrices of the augmented data:

* ``G = [A e]'[A e]`` and ``H = [B e]'[B e]`` (rows optionally weighted by
  per-sample fuzzy scores for the IF variants);
* GEPSVM-family planes minimize the generalized Rayleigh quotient
  ``z'(G + delta*I)z / z'Hz`` (and with G, H swapped), solved as a
  symmetric-definite pencil;
* IGEPSVM-family planes minimize ``z'(G + eta*I - delta*H)z`` over unit
  ``z``, a standard symmetric eigenproblem.

With a non-linear kernel the data matrix is replaced by the Gram matrix
against the stacked reference ``C = [A; B]``, which the trained model
retains for prediction.

A new point is assigned to the class whose plane is nearer in the
normalized sense ``|w'phi(x) + b| / wnorm``; ties go to +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import ifscore, kernels, linalg
from .errors import DimensionMismatch, DomainViolation, EmptyClass, NonFinite, ParseError
from .ifscore import BETA_AUTO, IfParams
from .kernels import GAUSSIAN, LINEAR, KernelSpec

WNORM_FLOOR = 1e-12

MODEL_FORMAT = "eigensvm-model-v1"


class Variant(str, Enum):
    GEPSVM = "gepsvm"
    IGEPSVM = "igepsvm"
    IF_GEPSVM = "if-gepsvm"
    IF_IGEPSVM = "if-igepsvm"

    @property
    def is_fuzzy(self) -> bool:
        return self in (Variant.IF_GEPSVM, Variant.IF_IGEPSVM)

    @property
    def uses_eta(self) -> bool:
        return self in (Variant.IGEPSVM, Variant.IF_IGEPSVM)


@dataclass(frozen=True)
class HyperParams:
    """Fit configuration shared by all variants.

    ``delta`` weighs the opposite class (regularizer in the GEPSVM family,
    subtraction weight in the IGEPSVM family); ``eta`` is the Tikhonov term
    of the IGEPSVM family; ``ridge`` stabilizes pencil denominators;
    ``if_params`` configures fuzzy scoring for the IF variants.
    """

    delta: float = 1.0
    eta: float = 0.0
    kernel: KernelSpec = field(default_factory=KernelSpec)
    if_params: IfParams | None = None
    ridge: float = 1e-12

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainViolation(f"delta must be positive, got {self.delta}")
        if self.eta < 0:
            raise DomainViolation(f"eta must be nonnegative, got {self.eta}")
        if self.ridge < 0:
            raise DomainViolation(f"ridge must be nonnegative, got {self.ridge}")


@dataclass(frozen=True)
class Hyperplane:
    """One proximal plane ``w'phi(x) + b = 0`` with its precomputed norm."""

    w: np.ndarray
    b: float
    wnorm: float


@dataclass(frozen=True)
class TrainedModel:
    variant: Variant
    plane_pos: Hyperplane
    plane_neg: Hyperplane
    kernel: KernelSpec
    reference: np.ndarray | None
    params: HyperParams

    @property
    def n_features(self) -> int:
        if self.reference is not None:
            return self.reference.shape[1]
        return self.plane_pos.w.shape[0]


def _check_classes(A: np.ndarray, B: np.ndarray):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2:
        raise DimensionMismatch("class matrices must be 2-D")
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise EmptyClass("both classes need at least one sample")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(
            f"feature counts differ: A has {A.shape[1]}, B has {B.shape[1]}"
        )
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise NonFinite("training data contains NaN or Inf")
    return A, B


def _augmented(M: np.ndarray, scores: np.ndarray | None) -> np.ndarray:
    aug = np.hstack([M, np.ones((M.shape[0], 1))])
    if scores is not None:
        scores = np.asarray(scores, dtype=float)
        if scores.shape != (M.shape[0],):
            raise DimensionMismatch(
                f"score vector length {scores.shape} does not match {M.shape[0]} rows"
            )
        aug = scores[:, None] * aug
    return aug


def moment_matrices(
    A: np.ndarray,
    B: np.ndarray,
    s1: np.ndarray | None = None,
    s2: np.ndarray | None = None,
    kernel: KernelSpec | None = None,
):
    """Moment matrices ``(G, H)`` of the (optionally score-weighted) classes.

    With ``kernel=None`` these are the linear moments of order ``n+1``;
    with a kernel they are the Gram-space moments of order ``m+1`` built
    against the stacked reference ``C = [A; B]``.
    """
    A, B = _check_classes(A, B)
    if kernel is None:
        GA, GB = A, B
    else:
        C = np.vstack([A, B])
        GA = kernels.gram(A, C, kernel)
        GB = kernels.gram(B, C, kernel)
    P1 = _augmented(GA, s1)
    Q1 = _augmented(GB, s2)
    return P1.T @ P1, Q1.T @ Q1


def resolved_if_params(hp: HyperParams) -> IfParams:
    """Fill in the score kernel an IF fit will actually use.

    An explicit ``score_kernel`` wins; otherwise the classifier's Gaussian
    kernel is inherited, and a linear classifier falls back to
    Gaussian(sigma=1) because fuzzy geometry needs a bounded feature space.
    """
    p = hp.if_params if hp.if_params is not None else IfParams()
    if p.score_kernel is not None:
        return p
    if hp.kernel.kind == GAUSSIAN:
        return replace(p, score_kernel=hp.kernel)
    return replace(p, score_kernel=KernelSpec(GAUSSIAN, 1.0))


def training_scores(A: np.ndarray, B: np.ndarray, hp: HyperParams):
    """Per-sample fuzzy scores ``(s1, s2)`` an IF fit would assign to A and B."""
    features = np.vstack([A, B])
    labels = np.concatenate([np.full(A.shape[0], +1), np.full(B.shape[0], -1)])
    return ifscore.score_matrices(features, labels, resolved_if_params(hp))


def _solve_planes(G: np.ndarray, H: np.ndarray, variant: Variant, hp: HyperParams):
    order = G.shape[0]
    I = np.eye(order)
    if variant in (Variant.GEPSVM, Variant.IF_GEPSVM):
        z1 = linalg.gen_eig_smallest(G + hp.delta * I, H, hp.ridge).vector
        z2 = linalg.gen_eig_smallest(H + hp.delta * I, G, hp.ridge).vector
    else:
        z1 = linalg.sym_eig_smallest(G + hp.eta * I - hp.delta * H).vector
        z2 = linalg.sym_eig_smallest(H + hp.eta * I - hp.delta * G).vector
    return z1, z2


def _plane_from(z: np.ndarray, kernel: KernelSpec, reference: np.ndarray | None) -> Hyperplane:
    w, b = z[:-1], float(z[-1])
    if reference is None:
        wnorm = max(float(np.linalg.norm(w)), WNORM_FLOOR)
    else:
        quad = float(w @ kernels.gram(reference, reference, kernel) @ w)
        wnorm = float(np.sqrt(max(quad, WNORM_FLOOR)))
    return Hyperplane(w=w, b=b, wnorm=wnorm)


def fit_from_moments(
    variant: Variant,
    G: np.ndarray,
    H: np.ndarray,
    hp: HyperParams,
    reference: np.ndarray | None = None,
) -> TrainedModel:
    """Assemble a model from precomputed moment matrices.

    Grid search uses this to sweep (delta, eta) without rebuilding G and H;
    ``reference`` must be the stacked training rows whenever the matrices
    came from the Gram-space path, and None otherwise.
    """
    z1, z2 = _solve_planes(G, H, variant, hp)
    return TrainedModel(
        variant=variant,
        plane_pos=_plane_from(z1, hp.kernel, reference),
        plane_neg=_plane_from(z2, hp.kernel, reference),
        kernel=hp.kernel,
        reference=reference,
        params=hp,
    )


def _fit(
    variant: Variant,
    A: np.ndarray,
    B: np.ndarray,
    hp: HyperParams,
    score_override=None,
    force_kernel_path: bool = False,
) -> TrainedModel:
    A, B = _check_classes(A, B)
    if variant.is_fuzzy:
        s1, s2 = score_override if score_override is not None else training_scores(A, B, hp)
    else:
        s1 = s2 = None
    kernel_path = force_kernel_path or hp.kernel.kind != LINEAR
    if kernel_path:
        reference = np.vstack([A, B])
        G, H = moment_matrices(A, B, s1, s2, kernel=hp.kernel)
    else:
        reference = None
        G, H = moment_matrices(A, B, s1, s2)
    return fit_from_moments(variant, G, H, hp, reference)


def fit_gepsvm(A, B, hp: HyperParams) -> TrainedModel:
    """Fit the plain generalized-eigenvalue variant."""
    return _fit(Variant.GEPSVM, A, B, hp)


def fit_igepsvm(A, B, hp: HyperParams) -> TrainedModel:
    """Fit the standard-eigenvalue (subtraction) variant."""
    return _fit(Variant.IGEPSVM, A, B, hp)


def fit_if_gepsvm(A, B, hp: HyperParams, score_override=None) -> TrainedModel:
    """Fit the fuzzy-weighted generalized-eigenvalue variant.

    ``score_override=(s1, s2)`` bypasses score computation; it exists for
    tests that pin the score matrices.
    """
    return _fit(Variant.IF_GEPSVM, A, B, hp, score_override=score_override)


def fit_if_igepsvm(A, B, hp: HyperParams, score_override=None) -> TrainedModel:
    """Fit the fuzzy-weighted standard-eigenvalue variant."""
    return _fit(Variant.IF_IGEPSVM, A, B, hp, score_override=score_override)


def fit_kernel_variant(
    variant: Variant, A, B, hp: HyperParams, score_override=None
) -> TrainedModel:
    """Fit any variant through the Gram-space path, whatever ``hp.kernel`` is.

    Mainly useful to cross-check that a linear kernel pushed through this
    path reproduces the native linear fit.
    """
    return _fit(variant, A, B, hp, score_override=score_override, force_kernel_path=True)


def fit(variant: Variant, A, B, hp: HyperParams) -> TrainedModel:
    """Fit by variant name; dispatches on ``hp.kernel`` automatically."""
    return _fit(variant, A, B, hp)


def decision_distances(model: TrainedModel, X) -> np.ndarray:
    """Normalized distances of each row of ``X`` to both planes, shape (m, 2)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"expected {model.n_features} features, got {X.shape[1]}"
        )
    if model.reference is None:
        phi = X
    else:
        phi = kernels.gram(X, model.reference, model.kernel)
    out = np.empty((X.shape[0], 2))
    for j, plane in enumerate((model.plane_pos, model.plane_neg)):
        out[:, j] = np.abs(phi @ plane.w + plane.b) / plane.wnorm
    return out


def predict(model: TrainedModel, X) -> np.ndarray:
    """Class labels (+1/-1) for each row of ``X``; ties resolve to +1."""
    d = decision_distances(model, X)
    return np.where(d[:, 0] <= d[:, 1], +1, -1)


def _fmt(x: float) -> str:
    return repr(float(x))


def save_model(model: TrainedModel, path: str) -> None:
    """Write a model as self-describing flat text, full-precision decimal."""
    hp = model.params
    lines = [
        f"format {MODEL_FORMAT}",
        f"variant {model.variant.value}",
        _kernel_line("kernel", model.kernel),
        f"delta {_fmt(hp.delta)}",
        f"eta {_fmt(hp.eta)}",
        f"ridge {_fmt(hp.ridge)}",
    ]
    if model.variant.is_fuzzy:
        p = hp.if_params if hp.if_params is not None else IfParams()
        lines.append(f"if_gamma {_fmt(p.gamma)}")
        beta = p.beta if p.beta == BETA_AUTO else _fmt(p.beta)
        lines.append(f"if_beta {beta}")
        if p.score_kernel is None:
            lines.append("if_score_kernel inherit")
        else:
            lines.append(_kernel_line("if_score_kernel", p.score_kernel))
    for tag, plane in (("plane_pos", model.plane_pos), ("plane_neg", model.plane_neg)):
        lines.append(f"{tag}_b {_fmt(plane.b)}")
        lines.append(f"{tag}_wnorm {_fmt(plane.wnorm)}")
        lines.append(f"{tag}_w " + " ".join(_fmt(v) for v in plane.w))
    if model.reference is not None:
        m, n = model.reference.shape
        lines.append(f"reference {m} {n}")
        for row in model.reference:
            lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _kernel_line(key: str, spec: KernelSpec) -> str:
    if spec.kind == GAUSSIAN:
        return f"{key} gaussian {_fmt(spec.sigma)}"
    return f"{key} linear"


def _parse_kernel(tokens: list[str]) -> KernelSpec:
    if tokens[0] == GAUSSIAN:
        return KernelSpec(GAUSSIAN, float(tokens[1]))
    return KernelSpec(LINEAR)


def load_model(path: str) -> TrainedModel:
    """Read a model written by :func:`save_model`."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    fields: dict[str, list[str]] = {}
    i = 0
    reference = None
    while i < len(lines):
        key, *rest = lines[i].split()
        if key == "reference":
            m, n = int(rest[0]), int(rest[1])
            rows = [
                [float(v) for v in lines[i + 1 + r].split()] for r in range(m)
            ]
            reference = np.array(rows).reshape(m, n)
            i += 1 + m
            continue
        fields[key] = rest
        i += 1
    if fields.get("format") != [MODEL_FORMAT]:
        raise ParseError(f"{path}: not a {MODEL_FORMAT} file")
    variant = Variant(fields["variant"][0])
    kernel = _parse_kernel(fields["kernel"])
    if_params = None
    if variant.is_fuzzy:
        beta_tok = fields["if_beta"][0]
        score_tok = fields["if_score_kernel"]
        if_params = IfParams(
            gamma=float(fields["if_gamma"][0]),
            beta=BETA_AUTO if beta_tok == BETA_AUTO else float(beta_tok),
            score_kernel=None if score_tok == ["inherit"] else _parse_kernel(score_tok),
        )
    hp = HyperParams(
        delta=float(fields["delta"][0]),
        eta=float(fields["eta"][0]),
        kernel=kernel,
        if_params=if_params,
        ridge=float(fields["ridge"][0]),
    )
    planes = {}
    for tag in ("plane_pos", "plane_neg"):
        planes[tag] = Hyperplane(
            w=np.array([float(v) for v in fields[f"{tag}_w"]]),
            b=float(fields[f"{tag}_b"][0]),
            wnorm=float(fields[f"{tag}_wnorm"][0]),
        )
    return TrainedModel(
        variant=variant,
        plane_pos=planes["plane_pos"],
        plane_neg=planes["plane_neg"],
        kernel=kernel,
        reference=reference,
        params=hp,
    )
