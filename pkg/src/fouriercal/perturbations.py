"""Link functions mapping a few calibration parameters to per-measurement
frequency perturbations.

A :class:`PerturbationModel` carries a partition ``{L_k}`` of the M
measurement indices into P groups; every measurement in group k derives its
frequency offset from the single parameter ``beta_k`` through a link
``h(beta_k, u_i)``:

    independent       1D, P = M, delta_i = beta_i
    identity_groups   1D, delta_i = beta_k shared across the group
    tomo_angle        2D, group = tomographic spoke, beta_k = angle error:
                      delta_i = rho_i * (cos(a_k+b_k) - cos a_k,
                                         sin(a_k+b_k) - sin a_k)
    mri_radial_delay  2D, group = readout spoke, beta_k = gradient delay:
                      delta_i = K * beta_k * (cos a_k, sin a_k)

The tomography link subtracts the unperturbed point on the spoke, which is
the reading consistent with rotating a slice by the angle error.  The MRI
link is the constant-delay model: one delay per readout shifts every sample
along the spoke direction by a hardware constant K times the delay.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import FrequencySet

KINDS = ("independent", "identity_groups", "tomo_angle", "mri_radial_delay")


@dataclass(frozen=True)
class PerturbationModel:
    """Group partition plus the per-kind link constants."""

    kind: str
    groups: tuple[np.ndarray, ...]
    r: float
    alphas: np.ndarray | None = None   # spoke angle per group (2D kinds)
    rho: np.ndarray | None = None      # radius per measurement (tomo_angle)
    K: float = 1.0                     # hardware constant (mri_radial_delay)
    group_of: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.r < 0:
            raise ValueError("parameter bound r must be >= 0")
        groups = tuple(np.asarray(g, dtype=int) for g in self.groups)
        sizes = sum(len(g) for g in groups)
        if sizes == 0:
            raise ValueError("groups must cover at least one measurement")
        all_idx = np.concatenate([g for g in groups])
        m = sizes
        cover = np.sort(all_idx)
        if len(np.unique(all_idx)) != m or cover[0] != 0 or cover[-1] != m - 1:
            raise ValueError("groups must partition the measurement indices")
        group_of = np.empty(m, dtype=int)
        for k, g in enumerate(groups):
            group_of[g] = k
        if self.kind == "independent" and len(groups) != m:
            raise ValueError("independent kind requires singleton groups")
        if self.kind in ("tomo_angle", "mri_radial_delay"):
            if self.alphas is None or len(self.alphas) != len(groups):
                raise ValueError("2D kinds need one spoke angle per group")
            object.__setattr__(self, "alphas", np.asarray(self.alphas, float))
        if self.kind == "tomo_angle":
            if self.rho is None or len(self.rho) != m:
                raise ValueError("tomo_angle needs a radius per measurement")
            object.__setattr__(self, "rho", np.asarray(self.rho, float))
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "group_of", group_of)

    @property
    def P(self) -> int:
        return len(self.groups)

    @property
    def M(self) -> int:
        return self.group_of.shape[0]

    @property
    def is_2d(self) -> bool:
        return self.kind in ("tomo_angle", "mri_radial_delay")


def independent_model(m: int, r: float) -> PerturbationModel:
    """One free perturbation per measurement."""
    groups = tuple(np.array([i]) for i in range(m))
    return PerturbationModel("independent", groups, r)


def identity_group_model(m: int, n_groups: int, r: float) -> PerturbationModel:
    """Contiguous near-equal groups sharing one perturbation value each."""
    if not 1 <= n_groups <= m:
        raise ValueError("need 1 <= n_groups <= M")
    groups = tuple(np.array_split(np.arange(m), n_groups))
    return PerturbationModel("identity_groups", groups, r)


def expand(model: PerturbationModel, beta: np.ndarray,
           u: np.ndarray | None = None) -> np.ndarray:
    """Apply the link function: parameters ``beta`` -> per-measurement ``delta``."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (model.P,):
        raise ValueError(f"beta must have {model.P} entries")
    if np.any(np.abs(beta) > model.r + 1e-12):
        raise ValueError("|beta| exceeds the model bound r")
    if u is not None and np.asarray(u).shape[0] != model.M:
        raise ValueError("u length does not match the model")

    if model.kind in ("independent", "identity_groups"):
        return beta[model.group_of]

    a = model.alphas[model.group_of]
    b = beta[model.group_of]
    if model.kind == "tomo_angle":
        dx = model.rho * (np.cos(a + b) - np.cos(a))
        dy = model.rho * (np.sin(a + b) - np.sin(a))
        return np.stack([dx, dy], axis=1)
    # mri_radial_delay
    shift = model.K * b
    return np.stack([shift * np.cos(a), shift * np.sin(a)], axis=1)


def delta_bound(model: PerturbationModel) -> float:
    """Componentwise bound on |delta| implied by |beta| <= r."""
    if model.kind in ("independent", "identity_groups"):
        return model.r
    if model.kind == "tomo_angle":
        return float(np.max(np.abs(model.rho), initial=0.0)) * model.r
    return abs(model.K) * model.r


def make_radial_spokes(n_spokes: int, per_spoke: int, n: int,
                       beta_bound: float = 0.0) -> tuple[FrequencySet, PerturbationModel]:
    """Radial 2D sampling: equispaced spoke angles through the origin.

    Spoke k sits at angle ``k * pi / n_spokes``; each spoke carries
    ``per_spoke`` frequencies spaced uniformly in radius over
    ``[-(N/2 - 1), N/2 - 1]``.  Groups are one per spoke with a tomo_angle
    link bounded by ``beta_bound`` (radians).
    """
    if n_spokes < 1 or per_spoke < 1:
        raise ValueError("need at least one spoke and one point per spoke")
    rho_max = n / 2.0 - 1.0
    radii = np.linspace(-rho_max, rho_max, per_spoke)
    alphas = np.arange(n_spokes) * np.pi / n_spokes
    u = np.empty((n_spokes * per_spoke, 2))
    rho = np.empty(n_spokes * per_spoke)
    groups = []
    for k, a in enumerate(alphas):
        idx = np.arange(k * per_spoke, (k + 1) * per_spoke)
        u[idx, 0] = radii * np.cos(a)
        u[idx, 1] = radii * np.sin(a)
        rho[idx] = radii
        groups.append(idx)
    model = PerturbationModel("tomo_angle", tuple(groups), beta_bound,
                              alphas=alphas, rho=rho)
    freq = FrequencySet(u, np.zeros_like(u), r=delta_bound(model))
    return freq, model
