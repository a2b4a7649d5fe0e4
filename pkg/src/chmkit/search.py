"""Multi-start phase search for dephased CHMs with a prescribed spectrum.

The search space is the 25 free phases of a dephased unimodular 6x6 matrix
(first row and column pinned to ones, which removes the diagonal-equivalence
orbit directions).  The objective combines the unitarity defect with a
spectral penalty: either the squared multiset distance to an explicit target
spectrum, or a clustering penalty for a multiplicity pattern whose cluster
centers float on the circle of radius sqrt(6).

Descent uses the analytic gradient of the unitarity term plus a
simultaneous-perturbation estimate for the spectral term, with backtracking
line search; promising iterates are polished by a damped Gauss-Newton pass
on the full residual vector.  Restarts provide globalization and every draw
is keyed by (seed, restart index), so reports are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import chm_residuals
from .eigen import Spectrum, spectrum_distance
from .spectral import multiplicity_profile

SQRT6 = math.sqrt(6.0)

#: margin used by the non-Hermitian barrier: candidates must keep
#: ||H - H^dag||_F^2 at or above this value
HERMITIAN_BARRIER = 0.1


def parse_pattern(text: str):
    """Parse a multiplicity pattern like ``[4,1,1]`` or ``2,2,1,1``.

    A ``-non-hermitian`` suffix adds the anti-Hermitian barrier.  Returns
    ``(pattern_tuple, non_hermitian_flag)``.
    """
    s = text.strip().lower()
    non_herm = False
    if s.endswith("-non-hermitian"):
        non_herm = True
        s = s[: -len("-non-hermitian")]
    s = s.strip("[]() ")
    try:
        parts = tuple(sorted((int(p) for p in s.split(",")), reverse=True))
    except ValueError as exc:
        raise ValueError(f"cannot parse multiplicity pattern {text!r}") from exc
    if not parts or any(p < 1 for p in parts):
        raise ValueError(f"pattern entries must be positive integers: {text!r}")
    return parts, non_herm


@dataclass(frozen=True)
class SearchTask:
    """Target description plus restart/iteration/seed policy.

    ``min_cluster_gap`` is the separation below which two cluster centers of
    a multiplicity pattern count as coinciding; without it a pattern like
    [3,1,1,1] could be satisfied for free by splitting one cluster of a
    [3,3] spectrum into identical singletons.
    """

    target: object  # Spectrum or multiplicity pattern tuple
    n: int = 6
    restarts: int = 50
    max_iters: int = 5000
    seed: int = 0
    tol_success: float = 1e-8
    w_chm: float = 1.0
    w_spec: float = 1.0
    min_cluster_gap: float = 0.5
    non_hermitian: bool = False
    stop_on_success: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.w_chm <= 0 or self.w_spec <= 0:
            raise ValueError("weights must be positive")
        target = self.target
        if isinstance(target, str):
            pattern, non_herm = parse_pattern(target)
            object.__setattr__(self, "target", pattern)
            if non_herm:
                object.__setattr__(self, "non_hermitian", True)
            target = pattern
        elif isinstance(target, (list, tuple)) and not isinstance(target, Spectrum):
            object.__setattr__(self, "target", tuple(sorted(map(int, target), reverse=True)))
            target = self.target
        if isinstance(target, tuple):
            if sum(target) != self.n:
                raise ValueError(
                    f"pattern {target} sums to {sum(target)}, expected n = {self.n}"
                )
        elif isinstance(target, Spectrum):
            if target.n != self.n:
                raise ValueError("target spectrum size must equal n")
        else:
            raise TypeError("target must be a Spectrum, a pattern tuple, or a string")

    @property
    def num_phases(self) -> int:
        return (self.n - 1) ** 2

    def to_json(self) -> str:
        if isinstance(self.target, Spectrum):
            target = {"spectrum": [[v.real, v.imag] for v in self.target.values]}
        else:
            target = {"pattern": list(self.target)}
        return json.dumps(
            {
                "n": self.n,
                "target": target,
                "restarts": self.restarts,
                "max_iters": self.max_iters,
                "seed": self.seed,
                "tol_success": self.tol_success,
                "w_chm": self.w_chm,
                "w_spec": self.w_spec,
                "min_cluster_gap": self.min_cluster_gap,
                "non_hermitian": self.non_hermitian,
                "stop_on_success": self.stop_on_success,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SearchTask":
        obj = json.loads(text)
        raw = obj["target"]
        if "spectrum" in raw:
            target = Spectrum(np.array([complex(re, im) for re, im in raw["spectrum"]]))
        else:
            target = tuple(raw["pattern"])
        return cls(
            target=target,
            n=obj.get("n", 6),
            restarts=obj["restarts"],
            max_iters=obj["max_iters"],
            seed=obj["seed"],
            tol_success=obj.get("tol_success", 1e-8),
            w_chm=obj.get("w_chm", 1.0),
            w_spec=obj.get("w_spec", 1.0),
            min_cluster_gap=obj.get("min_cluster_gap", 0.5),
            non_hermitian=obj.get("non_hermitian", False),
            stop_on_success=obj.get("stop_on_success", True),
        )


@dataclass(frozen=True)
class RestartTrace:
    restart: int
    seed: int
    final_residual: float
    iterations: int


@dataclass(frozen=True)
class SearchReport:
    """Best candidate over all restarts plus the per-restart convergence trace."""

    task: SearchTask
    best_residual: float
    best_phases: np.ndarray
    best_matrix: np.ndarray
    best_spectrum: Spectrum
    traces: list
    found: bool
    found_restart: int | None = None

    @property
    def verdict(self) -> str:
        return "found" if self.found else "not-found"

    def to_json(self) -> str:
        return json.dumps(
            {
                "task": json.loads(self.task.to_json()),
                "best_residual": self.best_residual,
                "verdict": self.verdict,
                "found_restart": self.found_restart,
                "best_phases": list(self.best_phases),
                "best_matrix": {
                    "n": self.task.n,
                    "re": self.best_matrix.real.tolist(),
                    "im": self.best_matrix.imag.tolist(),
                },
                "best_spectrum": [[v.real, v.imag] for v in self.best_spectrum.values],
                "trace": [
                    [t.restart, t.seed, t.final_residual, t.iterations] for t in self.traces
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SearchReport":
        obj = json.loads(text)
        task = SearchTask.from_json(json.dumps(obj["task"]))
        mat = np.array(obj["best_matrix"]["re"]) + 1j * np.array(obj["best_matrix"]["im"])
        return cls(
            task=task,
            best_residual=obj["best_residual"],
            best_phases=np.array(obj["best_phases"]),
            best_matrix=mat,
            best_spectrum=Spectrum(np.array([complex(r, i) for r, i in obj["best_spectrum"]])),
            traces=[RestartTrace(*row) for row in obj["trace"]],
            found=obj["verdict"] == "found",
            found_restart=obj["found_restart"],
        )


# ---------------------------------------------------------------------------
# objective pieces
# ---------------------------------------------------------------------------

def phases_to_matrix(phases: np.ndarray, n: int = 6) -> np.ndarray:
    """Dephased unimodular matrix with free phases on rows/columns 2..n."""
    phases = np.asarray(phases, dtype=np.float64)
    H = np.ones((n, n), dtype=np.complex128)
    H[1:, 1:] = np.exp(1j * phases.reshape(n - 1, n - 1))
    return H


def matrix_to_phases(H: np.ndarray) -> np.ndarray:
    """Free-phase vector of a dephased unimodular matrix (inverse of above)."""
    H = np.asarray(H, dtype=np.complex128)
    return np.angle(H[1:, 1:]).ravel()


def _unitarity_defect(H: np.ndarray, n: int):
    G = H @ H.conj().T - n * np.eye(n)
    return float(np.sum(np.abs(G) ** 2)), G


def chm_gradient(phases: np.ndarray, n: int = 6) -> np.ndarray:
    """Analytic gradient of ||H H^dag - n I||_F^2 in the free phases."""
    H = phases_to_matrix(phases, n)
    _, G = _unitarity_defect(H, n)
    # d/d theta_jk = -4 Im( h_jk * conj((G H)_jk) ) on the free block
    full = -4.0 * np.imag(H * np.conj(G @ H))
    return full[1:, 1:].ravel()


def _partition_masks(pattern: tuple, n: int) -> np.ndarray:
    """Boolean masks [P, K, n] for every set partition into the given sizes."""
    key = (pattern, n)
    cache = _partition_masks.__dict__.setdefault("cache", {})
    if key in cache:
        return cache[key]
    partitions = []

    def rec(remaining, sizes, acc):
        if not sizes:
            partitions.append(tuple(acc))
            return
        size = sizes[0]
        for block in itertools.combinations(remaining, size):
            left = tuple(x for x in remaining if x not in block)
            rec(left, sizes[1:], acc + [block])

    rec(tuple(range(n)), tuple(pattern), [])
    # deduplicate permutations of equal-size blocks
    seen = set()
    masks = []
    for part in partitions:
        canon = tuple(sorted(part))
        if canon in seen:
            continue
        seen.add(canon)
        m = np.zeros((len(pattern), n), dtype=bool)
        for ci, block in enumerate(part):
            m[ci, list(block)] = True
        masks.append(m)
    out = np.array(masks)
    cache[key] = out
    return out


def pattern_penalty(
    eigs: np.ndarray, pattern: tuple, n: int = 6, min_gap: float = 0.5
) -> float:
    """Clustering penalty: spread, center-modulus defect, and separation.

    Minimized exactly over all assignments of the n eigenvalues into blocks
    of the given sizes.  Per block: the within-block spread plus the
    deviation of the block-center modulus from sqrt(n); per block pair: a
    hinge that charges centers closer than ``min_gap``, so the pattern means
    an exact multiplicity profile rather than any refinement of one.
    Cluster centers are block means, so they float freely on the circle.
    """
    masks = _partition_masks(tuple(pattern), n)  # [P, K, n]
    counts = masks.sum(axis=2)  # [P, K]
    sums = masks @ eigs  # [P, K] complex
    means = sums / counts
    sq = masks @ (np.abs(eigs) ** 2)  # [P, K]
    within = np.maximum(sq - (np.abs(sums) ** 2) / counts, 0.0)
    center = (np.abs(means) - math.sqrt(n)) ** 2
    costs = (within + center).sum(axis=1)
    k = means.shape[1]
    if k > 1 and min_gap > 0.0:
        iu, ju = np.triu_indices(k, 1)
        gaps = np.abs(means[:, iu] - means[:, ju])  # [P, pairs]
        costs = costs + (np.maximum(min_gap - gaps, 0.0) ** 2).sum(axis=1)
    return float(costs.min())


def _spectral_penalty(H: np.ndarray, task: SearchTask) -> float:
    eigs = np.linalg.eigvals(H)
    if isinstance(task.target, Spectrum):
        return spectrum_distance(Spectrum(eigs), task.target) ** 2
    return pattern_penalty(eigs, task.target, task.n)


def _barrier(H: np.ndarray) -> float:
    herm = float(np.sum(np.abs(H - H.conj().T) ** 2))
    gap = HERMITIAN_BARRIER - herm
    return gap * gap if gap > 0.0 else 0.0


def objective(phases, task: SearchTask) -> float:
    """w_chm * ||H H^dag - n I||_F^2 + w_spec * spectral penalty (+ barrier)."""
    phases = np.asarray(phases, dtype=np.float64).ravel()
    if phases.size != task.num_phases:
        raise ValueError(f"expected {task.num_phases} phases, got {phases.size}")
    H = phases_to_matrix(phases, task.n)
    val = task.w_chm * _unitarity_defect(H, task.n)[0]
    val += task.w_spec * _spectral_penalty(H, task)
    if task.non_hermitian:
        val += _barrier(H)
    return float(val)


def gradient_check(phases, h: float = 1e-6, n: int = 6) -> float:
    """Max mismatch between the analytic unitarity-term gradient and central
    finite differences, relative to max(1, |gradient|), over all coordinates."""
    phases = np.asarray(phases, dtype=np.float64).ravel()
    if phases.size != (n - 1) ** 2:
        raise ValueError(f"expected {(n - 1) ** 2} phases, got {phases.size}")
    ga = chm_gradient(phases, n)
    gf = np.empty_like(ga)
    for k in range(phases.size):
        bump = np.zeros_like(phases)
        bump[k] = h
        fp = _unitarity_defect(phases_to_matrix(phases + bump, n), n)[0]
        fm = _unitarity_defect(phases_to_matrix(phases - bump, n), n)[0]
        gf[k] = (fp - fm) / (2.0 * h)
    denom = np.maximum(1.0, np.maximum(np.abs(ga), np.abs(gf)))
    return float(np.max(np.abs(ga - gf) / denom))


# ---------------------------------------------------------------------------
# local descent: SPSA-assisted gradient steps + Gauss-Newton polish
# ---------------------------------------------------------------------------

def _spectral_value(phases: np.ndarray, task: SearchTask) -> float:
    H = phases_to_matrix(phases, task.n)
    v = task.w_spec * _spectral_penalty(H, task)
    if task.non_hermitian:
        v += _barrier(H)
    return v


def _match_to_reference(eigs: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Permute ``eigs`` to the least-squares match with ``ref`` (n <= 8)."""
    from .eigen import _all_perms

    perms = _all_perms(len(ref))
    cost = np.abs(ref[None, :] - eigs[perms]) ** 2
    best = perms[int(cost.sum(axis=1).argmin())]
    return eigs[best]


def _residual_vector(phases: np.ndarray, task: SearchTask, ref: np.ndarray, masks_row):
    """Stacked residuals for Gauss-Newton: unitarity block + spectral block."""
    n = task.n
    H = phases_to_matrix(phases, n)
    G = H @ H.conj().T - n * np.eye(n)
    parts = [math.sqrt(task.w_chm) * G.real.ravel(), math.sqrt(task.w_chm) * G.imag.ravel()]
    eigs = _match_to_reference(np.linalg.eigvals(H), ref)
    ws = math.sqrt(task.w_spec)
    if isinstance(task.target, Spectrum):
        diff = eigs - task.target.values
        parts += [ws * diff.real, ws * diff.imag]
    else:
        for block in masks_row:
            vals = eigs[block]
            mu = vals.mean()
            parts.append(ws * (vals - mu).real)
            parts.append(ws * (vals - mu).imag)
            parts.append(np.array([ws * (abs(mu) - math.sqrt(n))]))
    return np.concatenate(parts)


def _best_partition(eigs: np.ndarray, pattern: tuple, n: int):
    masks = _partition_masks(tuple(pattern), n)
    counts = masks.sum(axis=2)
    sums = masks @ eigs
    means = sums / counts
    sq = masks @ (np.abs(eigs) ** 2)
    within = sq - (np.abs(sums) ** 2) / counts
    center = (np.abs(means) - math.sqrt(n)) ** 2
    best = int((within + center).sum(axis=1).argmin())
    return [np.where(masks[best, k])[0] for k in range(masks.shape[1])]


def _polish(phases: np.ndarray, task: SearchTask, max_steps: int = 40):
    """Damped Gauss-Newton on the residual vector; returns (phases, value)."""
    n = task.n
    theta = phases.copy()
    f = objective(theta, task)
    lam = 1e-3
    h = 1e-7
    for _ in range(max_steps):
        eigs0 = np.linalg.eigvals(phases_to_matrix(theta, n))
        if isinstance(task.target, Spectrum):
            ref = _match_to_reference(eigs0, task.target.values)
            masks_row = None
        else:
            ref = eigs0
            masks_row = _best_partition(eigs0, task.target, n)
        r0 = _residual_vector(theta, task, ref, masks_row)
        J = np.empty((r0.size, theta.size))
        for k in range(theta.size):
            step = np.zeros_like(theta)
            step[k] = h
            J[:, k] = (_residual_vector(theta + step, task, ref, masks_row) - r0) / h
        JtJ = J.T @ J
        g = J.T @ r0
        improved = False
        for _ in range(8):
            try:
                delta = np.linalg.solve(JtJ + lam * np.eye(theta.size), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            cand = theta + delta
            fc = objective(cand, task)
            if fc < f:
                theta, f = cand, fc
                lam = max(lam / 3.0, 1e-12)
                improved = True
                break
            lam *= 10.0
        if not improved or f < 1e-24:
            break
    return theta, f


def _qualifies(phases: np.ndarray, task: SearchTask, value: float) -> bool:
    """Soundness gate for a 'found' verdict: CHM residuals and profile match."""
    if value > task.tol_success:
        return False
    H = phases_to_matrix(phases, task.n)
    if not chm_residuals(H, tol=1e-8).is_chm:
        return False
    from .eigen import eigenvalues

    spec = eigenvalues(H)
    if isinstance(task.target, Spectrum):
        return spectrum_distance(spec, task.target) <= 1e-6
    profile = tuple(multiplicity_profile(spec, cluster_tol=1e-6))
    if profile != tuple(task.target):
        return False
    if task.non_hermitian:
        herm = float(np.sum(np.abs(H - H.conj().T) ** 2))
        if herm < HERMITIAN_BARRIER:
            return False
    return True


def _descend(theta0: np.ndarray, task: SearchTask, rng: np.random.Generator,
             trace_rows: list | None, restart: int):
    """One restart: SPSA-assisted descent with Armijo backtracking, then polish."""
    theta = theta0.copy()
    f = objective(theta, task)
    step = 1e-2
    fails = 0
    iters = 0
    polish_due = 200
    for it in range(task.max_iters):
        iters = it + 1
        c = 1e-4 / (1.0 + it) ** 0.101
        delta = rng.integers(0, 2, theta.size) * 2.0 - 1.0
        sp = _spectral_value(theta + c * delta, task)
        sm = _spectral_value(theta - c * delta, task)
        g = task.w_chm * chm_gradient(theta, task.n) + ((sp - sm) / (2.0 * c)) * delta
        gn2 = float(g @ g)
        if gn2 < 1e-28:
            break
        # backtracking line search on the full objective
        t = step
        accepted = False
        for _ in range(40):
            cand = theta - t * g
            fc = objective(cand, task)
            if fc <= f - 1e-4 * t * gn2:
                theta, f = cand, fc
                step = min(t * 2.0, 1.0)
                accepted = True
                break
            t *= 0.5
            if t * math.sqrt(gn2) < 1e-13:
                break
        if trace_rows is not None:
            trace_rows.append((restart, it, f))
        if not accepted:
            fails += 1
            step = max(step * 0.5, 1e-12)
            if fails >= 4:
                break
        else:
            fails = 0
        if t * math.sqrt(gn2) < 1e-12:
            break
        if f < 1e-3 and it >= polish_due:
            theta, f = _polish(theta, task)
            polish_due = it + 200
            if f <= task.tol_success:
                break
    # every restart ends with a full polish so reported minima are honest
    # local minima of the objective, not artifacts of the descent schedule
    theta, f = _polish(theta, task, max_steps=80)
    return theta, f, iters


def minimize(task: SearchTask, trace_rows: list | None = None) -> SearchReport:
    """Run the multi-start search described by ``task``.

    Deterministic: restart r draws from a generator seeded with
    (task.seed, r).  When ``task.stop_on_success`` is set the loop ends at
    the first restart whose polished candidate passes the soundness gate.
    ``trace_rows``, when given, collects (restart, iteration, residual) rows.
    """
    best_f = math.inf
    best_theta = None
    traces = []
    found = False
    found_restart = None
    for r in range(task.restarts):
        rng = np.random.default_rng([task.seed, r])
        theta0 = rng.uniform(0.0, 2.0 * math.pi, task.num_phases)
        theta, f, iters = _descend(theta0, task, rng, trace_rows, r)
        traces.append(RestartTrace(restart=r, seed=task.seed, final_residual=f, iterations=iters))
        if f < best_f:
            best_f, best_theta = f, theta
        if _qualifies(theta, task, f):
            found = True
            found_restart = r
            best_f, best_theta = f, theta
            if task.stop_on_success:
                break
    H = phases_to_matrix(best_theta, task.n)
    from .eigen import eigenvalues

    return SearchReport(
        task=task,
        best_residual=best_f,
        best_phases=best_theta,
        best_matrix=H,
        best_spectrum=eigenvalues(H),
        traces=traces,
        found=found,
        found_restart=found_restart,
    )
