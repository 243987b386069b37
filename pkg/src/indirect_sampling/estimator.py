"""LMMSE error covariances, distortions and point estimates.

Two algebraically equivalent evaluations are available for each error
covariance. The *gain* form works in observation space (``m x m``); the
*information* form works in coefficient space and is the default.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass
from typing import Literal, Optional

import numpy as np
from scipy.linalg import LinAlgError, block_diag, cho_factor, cho_solve

from .errors import InvalidConfig, NumericalFailure
from .harmonics import HarmonicSystem, assemble, gamma_matrix, gram
from .model import ModelConfig, Realization, SamplingPlan

log = logging.getLogger(__name__)

Form = Literal["gain", "information"]

# Largest total sample count for which the m x m gain form is evaluated as a cross-check.
DENSE_LIMIT = 2000
COND_WARN = 1e12


class IllConditionedWarning(RuntimeWarning):
    pass


def _factor(M: np.ndarray, what: str):
    try:
        return cho_factor(M, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Cholesky factorization of {what} failed: {exc}") from exc


def _spd_inverse(M: np.ndarray, what: str) -> np.ndarray:
    out = cho_solve(_factor(M, what), np.eye(M.shape[0]))
    return 0.5 * (out + out.T)


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def error_cov_remote(sys: HarmonicSystem, form: Form = "information") -> np.ndarray:
    """Error covariance of the LMMSE estimate of the source coefficients (``2N x 2N``)."""
    n2 = 2 * sys.cfg.N
    if sys.m == 0:
        return np.eye(n2)
    if form == "gain":
        CY = _factor(sys.observation_covariance(), "observation covariance")
        return _sym(np.eye(n2) - sys.Qa.T @ cho_solve(CY, sys.Qa))
    if form == "information":
        Ct = _factor(sys.CzTilde, "effective noise covariance")
        J = sys.Qa.T @ cho_solve(Ct, sys.Qa) + np.eye(n2)
        return _spd_inverse(J, "remote information matrix")
    raise ValueError(f"unknown form {form!r}")


def error_cov_corrupted(sys: HarmonicSystem, form: Form = "information") -> np.ndarray:
    """Error covariance for the k stacked corrupted coefficient vectors (``2Nk x 2Nk``)."""
    Cx = sys.covariance_corrupted()
    if sys.m == 0:
        return Cx
    if form == "gain":
        CY = _factor(sys.observation_covariance(), "observation covariance")
        QC = sys.Qb @ Cx
        return _sym(Cx - QC.T @ cho_solve(CY, QC))
    if form == "information":
        inv_var = 1.0 / np.diag(sys.Cz)
        J = sys.Qb.T @ (inv_var[:, None] * sys.Qb) + sys.precision_corrupted()
        return _spd_inverse(J, "corrupted information matrix")
    raise ValueError(f"unknown form {form!r}")


def information_matrices(cfg: ModelConfig, plan: SamplingPlan) -> tuple[np.ndarray, np.ndarray]:
    """Information matrices of both targets from the per-signal Gram matrices only.

    Uses ``Q^T (eta Q Q^T + s I)^{-1} Q = (eta Q^T Q + s I)^{-1} Q^T Q`` so the cost
    is linear in the number of samples; this is what lets very long uniform
    plans be evaluated.
    """
    plan.check(cfg)
    n2 = 2 * cfg.N
    eye = np.eye(n2)
    Ja = eye.copy()
    blocks = []
    for ts, s2 in zip(plan.times, cfg.sigma2):
        G = gram(cfg, ts)
        Ja += np.linalg.solve(cfg.eta * G + s2 * eye, G)
        blocks.append(G / s2)
    Jb = block_diag(*blocks) + np.kron(gamma_matrix(cfg.k, cfg.eta), eye)
    return _sym(Ja), _sym(Jb)


@dataclass(frozen=True)
class DistortionReport:
    Da: float
    Db: float
    trace_Ce_a: float
    trace_Ce_b: float
    form_discrepancy: Optional[float]
    condition_estimate: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DistortionReport":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DistortionReport":
        return cls.from_dict(json.loads(text))


def _rel_gap(A: np.ndarray, B: np.ndarray) -> float:
    scale = max(np.max(np.abs(A)), np.max(np.abs(B)), np.finfo(float).tiny)
    return float(np.max(np.abs(A - B)) / scale)


def distortion(cfg: ModelConfig, plan: SamplingPlan, cross_check: Optional[bool] = None) -> DistortionReport:
    """Time-averaged MSE of the remote signal (``Da``) and of the corrupted set (``Db``).

    The traces come from the information form. When ``cross_check`` is true
    (default: whenever the total sample count is at most ``DENSE_LIMIT``) the
    gain form is also evaluated on the assembled system and the largest
    relative gap between the two is reported; otherwise ``form_discrepancy``
    is ``None``.
    """
    Ja, Jb = information_matrices(cfg, plan)
    Ce_a = _spd_inverse(Ja, "remote information matrix")
    Ce_b = _spd_inverse(Jb, "corrupted information matrix")
    cond = float(max(np.linalg.cond(Ja), np.linalg.cond(Jb)))
    if cond > COND_WARN:
        warnings.warn(f"information matrix condition number {cond:.3g} exceeds {COND_WARN:.0e}",
                      IllConditionedWarning, stacklevel=2)

    if cross_check is None:
        cross_check = cfg.total_samples <= DENSE_LIMIT
    gap = None
    if cross_check:
        sys_ = assemble(cfg, plan)
        ga = error_cov_remote(sys_, "gain")
        gb = error_cov_corrupted(sys_, "gain")
        gap = max(
            _rel_gap(ga, Ce_a),
            _rel_gap(gb, Ce_b),
            _rel_gap(ga, error_cov_remote(sys_, "information")),
            _rel_gap(gb, error_cov_corrupted(sys_, "information")),
        )
    else:
        log.debug("gain-form cross-check skipped for m=%d", cfg.total_samples)

    ta, tb = float(np.trace(Ce_a)), float(np.trace(Ce_b))
    return DistortionReport(
        Da=ta / 2, Db=tb / 2, trace_Ce_a=ta, trace_Ce_b=tb,
        form_discrepancy=gap, condition_estimate=cond,
    )


def gain_matrices(sys: HarmonicSystem) -> tuple[np.ndarray, np.ndarray]:
    """LMMSE gains ``(W_a, W_b)`` mapping stacked observations to both targets."""
    if sys.m == 0:
        return np.zeros((2 * sys.cfg.N, 0)), np.zeros((2 * sys.cfg.N * sys.cfg.k, 0))
    CY = _factor(sys.observation_covariance(), "observation covariance")
    Wa = cho_solve(CY, sys.Qa).T
    Wb = cho_solve(CY, sys.Qb @ sys.covariance_corrupted()).T
    return Wa, Wb


def reconstruct(cfg: ModelConfig, plan: SamplingPlan, realization: Optional[Realization],
                noisy_samples) -> tuple[np.ndarray, np.ndarray]:
    """LMMSE estimates of the source and of the stacked corrupted coefficients.

    ``noisy_samples`` is ``[Y_1; ...; Y_k]`` in plan order, either one vector
    of length ``m`` or a ``(trials, m)`` array. ``realization`` is only used
    to check dimensions and may be ``None``.
    """
    y = np.asarray(noisy_samples, dtype=float)
    if y.shape[-1] != cfg.total_samples:
        raise InvalidConfig(f"expected {cfg.total_samples} samples, got {y.shape[-1]}")
    if realization is not None and realization.x.shape[0] != 2 * cfg.N:
        raise InvalidConfig("realization does not match the configuration")
    Wa, Wb = gain_matrices(assemble(cfg, plan))
    return y @ Wa.T, y @ Wb.T
