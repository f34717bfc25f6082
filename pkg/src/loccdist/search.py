"""Bounded synthesis of projective discrimination protocols.

Depth-first search over heuristically generated candidate measurements.  A
candidate is admitted only if every outcome keeps the surviving states
pairwise orthogonal (the per-outcome diagonal of every cross operator must
vanish), which is necessary for reliable discrimination to remain possible.
The search is sound -- every returned protocol is re-verified -- but
incomplete: an exhausted search yields Unknown, never a claim of
impossibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble, make_ensemble
from .errors import DimensionMismatch, EmptyOutcome, NotOrthogonal
from .protocol import (
    ALICE,
    BOB,
    Leaf,
    Node,
    ProjectiveMeasurement,
    ProtocolTree,
    verify_protocol,
)
from .states import DEFAULT_TOL, make_state

STRATEGIES = ("standard", "cross-operator", "zero-diagonal", "exhaustive-2d",
              "user-supplied")
PARTY_ORDERS = ("free", "alternate", "alice-first", "bob-first")

YES = "yes"
PROVED_NO = "proved-no"
UNKNOWN = "unknown"

_DUST = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    """Tuning knobs for the protocol search.

    ``candidate_strategy`` picks the measurement generator tier; tiers are
    cumulative (every strategy includes the "standard" computational-basis
    and support-block candidates, "exhaustive-2d" additionally includes the
    cross-operator constructions and a Bloch-sphere grid for qubit parties).
    ``party_order`` constrains who measures: "free" tries Alice then Bob at
    every node, "alternate" forces consecutive rounds onto different parties,
    "alice-first"/"bob-first" fix the first round only.
    """

    max_depth: int = 6
    candidate_strategy: str = "cross-operator"
    tolerance: float = DEFAULT_TOL
    party_order: str = "free"
    beam_limit: int = 64
    bloch_grid_step: float = np.pi / 12
    user_candidates: tuple = ()

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.beam_limit < 1:
            raise ValueError("beam_limit must be >= 1")
        if self.candidate_strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.candidate_strategy!r}")
        if self.party_order not in PARTY_ORDERS:
            raise ValueError(f"unknown party order {self.party_order!r}")
        if self.bloch_grid_step <= 0:
            raise ValueError("bloch_grid_step must be positive")
        if self.candidate_strategy == "user-supplied" and not self.user_candidates:
            raise ValueError("user-supplied strategy needs user_candidates")


@dataclass(frozen=True, eq=False)
class CrossOperator:
    """Pairwise operators whose outcome diagonals must vanish.

    For states with amplitude matrices ``C_j``, ``C_l`` the Alice-side matrix
    is ``C_l @ C_j^+`` and the Bob-side matrix is ``C_l^T @ conj(C_j)``, so
    that ``<Psi_j|(P (x) I)|Psi_l> = trace(P @ alice_side)`` and
    ``<Psi_j|(I (x) P)|Psi_l> = trace(P @ bob_side)``.  The trace of either
    side is the plain overlap, hence zero for ensemble members.
    """

    j: int
    l: int
    alice_side: np.ndarray
    bob_side: np.ndarray

    @classmethod
    def from_states(cls, j, l, cj, cl):
        return cls(j, l, cl @ cj.conj().T, cl.T @ cj.conj())

    def side(self, party: str) -> np.ndarray:
        return self.alice_side if party == ALICE else self.bob_side


def cross_operators(e: Ensemble) -> list[CrossOperator]:
    ops = []
    for j in range(e.m):
        for l in range(j + 1, e.m):
            ops.append(CrossOperator.from_states(
                j, l, e.states[j].amplitudes, e.states[l].amplitudes))
    return ops


def valid_measurement(e: Ensemble, meas: ProjectiveMeasurement,
                      tol: float = DEFAULT_TOL) -> bool:
    """Whether every outcome preserves pairwise orthogonality of survivors."""
    expected = e.dim_a if meas.party == ALICE else e.dim_b
    if meas.local_dim != expected:
        raise DimensionMismatch(
            f"measurement on dim {meas.local_dim}, ensemble side has dim {expected}")
    ops = cross_operators(e)
    for q in meas.projectors:
        p = q @ q.conj().T
        for op in ops:
            if abs(np.einsum("ij,ji->", p, op.side(meas.party))) > tol:
                return False
    return True


def _local_dim(e: Ensemble, party: str) -> int:
    return e.dim_a if party == ALICE else e.dim_b


def _support_blocks(e: Ensemble, party: str, tol: float) -> list[list[int]]:
    """Connected components of the local basis indices coupled by any state."""
    d = _local_dim(e, party)
    adj = np.zeros((d, d), dtype=bool)
    for s in e.states:
        c = s.amplitudes
        rho = c @ c.conj().T if party == ALICE else c.T @ c.conj()
        adj |= np.abs(rho) > tol
    blocks = []
    seen = set()
    for start in range(d):
        if start in seen:
            continue
        stack, comp = [start], []
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            comp.append(i)
            stack.extend(j for j in range(d) if adj[i, j] and j not in seen)
        blocks.append(sorted(comp))
    return sorted(blocks, key=lambda b: b[0])


def _basis_columns(dim, indices):
    out = np.zeros((dim, len(indices)), dtype=np.complex128)
    for c, i in enumerate(indices):
        out[i, c] = 1.0
    return out


def _computational(party, dim) -> ProjectiveMeasurement:
    return ProjectiveMeasurement(
        party, tuple(_basis_columns(dim, [i]) for i in range(dim)))


def _rank_one(party, basis_matrix) -> ProjectiveMeasurement:
    cols = [basis_matrix[:, k].reshape(-1, 1) for k in range(basis_matrix.shape[1])]
    return ProjectiveMeasurement(party, tuple(cols))


def _pauli_vector(m: np.ndarray) -> np.ndarray:
    # coefficients of a 2x2 matrix on (sigma_x, sigma_y, sigma_z)
    return np.array([
        (m[0, 1] + m[1, 0]) / 2,
        1j * (m[0, 1] - m[1, 0]) / 2,
        (m[0, 0] - m[1, 1]) / 2,
    ])


def _bloch_basis(n: np.ndarray) -> np.ndarray:
    """Orthonormal qubit basis whose first vector has Bloch vector ``n``."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    theta = np.arccos(np.clip(n[2], -1.0, 1.0))
    phi = float(np.arctan2(n[1], n[0]))
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    w0 = np.array([c, np.exp(1j * phi) * s])
    w1 = np.array([-np.exp(-1j * phi) * s, c])
    return np.column_stack([w0, w1])


def _qubit_plane_bases(side_mats, tol) -> list[np.ndarray]:
    """Exact qubit bases with zero diagonal for every cross operator at once.

    A basis vector with Bloch vector n has <w|M|w> = m . n for a traceless M
    with (complex) Pauli vector m, so the admissible n are the real unit
    vectors orthogonal to Re(m) and Im(m) of every pair: the null space of
    the stacked constraint matrix.  One basis per null direction.
    """
    rows = []
    for m in side_mats:
        pv = _pauli_vector(m)
        for part in (pv.real, pv.imag):
            norm = np.linalg.norm(part)
            if norm > _DUST:
                rows.append(part / norm)
    if not rows:
        return []
    a = np.array(rows)
    _, sig, vt = np.linalg.svd(a)
    rank = int(np.count_nonzero(sig > 1e-8))
    return [_bloch_basis(vt[k]) for k in range(rank, 3)]


def _zero_diagonal_basis(h: np.ndarray, tol) -> np.ndarray | None:
    """Basis with vanishing diagonal for a traceless Hermitian matrix.

    Works in the eigenbasis, repeatedly rotating a positive-diagonal vector
    against a negative-diagonal one by the angle that zeroes one of the two;
    cross terms between the active vectors stay zero throughout, so each
    rotation retires at least one vector.
    """
    evals, evecs = np.linalg.eigh(h)
    scale = float(np.abs(evals).max())
    if scale <= tol:
        return None
    cut = 1e-10 * scale
    done = []
    active = [[float(evals[k]), evecs[:, k]] for k in range(len(evals))]
    active, zeroed = [a for a in active if abs(a[0]) > cut], [a for a in active
                                                              if abs(a[0]) <= cut]
    done.extend(v for _, v in zeroed)
    while active:
        if len(active) == 1:
            done.append(active[0][1])
            break
        active.sort(key=lambda a: a[0])
        lo, hi = active[0], active[-1]
        if hi[0] <= cut or lo[0] >= -cut:
            done.extend(v for _, v in active)
            break
        theta = np.arctan(np.sqrt(hi[0] / -lo[0]))
        c, s = np.cos(theta), np.sin(theta)
        done.append(c * hi[1] + s * lo[1])
        residual = [hi[0] + lo[0], -s * hi[1] + c * lo[1]]
        active = active[1:-1] + [residual]
    return np.column_stack(done)


def _canonical_phase(basis: np.ndarray) -> np.ndarray:
    out = basis.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        pivot = col[np.argmax(np.abs(col))]
        if abs(pivot) > _DUST:
            out[:, k] = col * (abs(pivot) / pivot)
    return out


def _measurement_key(meas: ProjectiveMeasurement):
    keys = []
    for q in meas.projectors:
        p = q @ q.conj().T
        # adding 0.0 folds negative zeros so equal projectors share a key
        keys.append((np.round(p.astype(np.complex128), 6) + 0.0).tobytes())
    return tuple(sorted(keys))


def _dedupe_sort_trim(tiers, beam_limit):
    out, seen = [], set()
    for tier in tiers:
        tier = sorted(tier, key=_measurement_key)
        for meas in tier:
            key = _measurement_key(meas)
            if key in seen:
                continue
            seen.add(key)
            out.append(meas)
    return out[:beam_limit]


def candidate_bases(e: Ensemble, party: str, cfg: SearchConfig | None = None):
    """Deterministic, duplicate-free candidate measurements for one party.

    Tier 0 (all strategies): the computational basis and, when the states'
    local supports split the basis indices into nontrivial components, the
    corresponding block-coarsened measurement.  Higher tiers derive bases
    from the cross operators: eigenbases of their Hermitian and
    anti-Hermitian parts ("cross-operator"), zero-diagonal bases built by
    pairing opposite-sign eigenvalues ("zero-diagonal"; realised exactly for
    qubit parties by the Bloch-plane solver), and a fixed Bloch-sphere grid
    ("exhaustive-2d").  The list is truncated at ``beam_limit``.
    """
    cfg = cfg or SearchConfig()
    d = _local_dim(e, party)
    tol = cfg.tolerance
    strategy = cfg.candidate_strategy

    if strategy == "user-supplied":
        tier = [m for m in cfg.user_candidates if m.party == party]
        return _dedupe_sort_trim([tier], cfg.beam_limit)

    standard = [_computational(party, d)]
    blocks = _support_blocks(e, party, tol)
    if len(blocks) >= 2 and any(len(b) > 1 for b in blocks):
        standard.append(ProjectiveMeasurement(
            party, tuple(_basis_columns(d, b) for b in blocks)))

    eig_tier: list[ProjectiveMeasurement] = []
    zero_tier: list[ProjectiveMeasurement] = []
    grid_tier: list[ProjectiveMeasurement] = []

    if strategy != "standard":
        sides = [op.side(party) for op in cross_operators(e)]
        sides = [m for m in sides if np.abs(m).max() > _DUST]
        parts = []
        for m in sides:
            for h in ((m + m.conj().T) / 2, (m - m.conj().T) / 2j):
                if np.abs(h).max() > _DUST:
                    parts.append(h)
        if strategy in ("cross-operator", "exhaustive-2d"):
            for h in parts:
                _, vecs = np.linalg.eigh(h)
                eig_tier.append(_rank_one(party, _canonical_phase(vecs)))
        if d == 2:
            zero_tier.extend(_rank_one(party, _canonical_phase(b))
                             for b in _qubit_plane_bases(sides, tol))
        else:
            for h in parts:
                basis = _zero_diagonal_basis(h, tol)
                if basis is not None:
                    zero_tier.append(_rank_one(party, _canonical_phase(basis)))
        if strategy == "exhaustive-2d" and d == 2:
            step = cfg.bloch_grid_step
            thetas = np.arange(0.0, np.pi / 2 + step / 2, step)
            phis = np.arange(0.0, 2 * np.pi - step / 2, step)
            for theta in thetas:
                for phi in phis:
                    n = np.array([np.sin(theta) * np.cos(phi),
                                  np.sin(theta) * np.sin(phi),
                                  np.cos(theta)])
                    grid_tier.append(_rank_one(party, _bloch_basis(n)))

    return _dedupe_sort_trim([standard, eig_tier, zero_tier, grid_tier],
                             cfg.beam_limit)


def surviving_states(e: Ensemble, party: str, projector,
                     tol: float = DEFAULT_TOL) -> Ensemble:
    """Ensemble of renormalized states that survive one outcome projector.

    ``projector`` is a matrix of orthonormal columns (or a single vector) in
    the acting party's local space.  States with post-measurement norm^2 at
    or below ``tol`` are dropped.  When the parent measurement preserved
    orthogonality the survivors form a valid ensemble; raises
    ``EmptyOutcome`` when nothing survives.
    """
    q = np.asarray(projector, dtype=np.complex128)
    if q.ndim == 1:
        q = q[:, np.newaxis]
    if q.shape[0] != _local_dim(e, party):
        raise DimensionMismatch(
            f"projector acts on dim {q.shape[0]}, party {party} has dim "
            f"{_local_dim(e, party)}")
    p = q @ q.conj().T
    survivors = []
    for s in e.states:
        mat = p @ s.amplitudes if party == ALICE else s.amplitudes @ p.T
        if float(np.linalg.norm(mat) ** 2) > tol:
            survivors.append(make_state(e.dim_a, e.dim_b, mat, name=s.name))
    if not survivors:
        raise EmptyOutcome("no ensemble member survives this outcome")
    return make_ensemble(survivors, tol=tol)


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    """Result of a protocol search.

    ``verdict`` is "yes" (verified protocol attached), "proved-no" (the
    Schmidt-sum necessary condition fails; report attached), or "unknown"
    (candidates exhausted at ``max_depth``).
    """

    verdict: str
    protocol: ProtocolTree | None
    schmidt_report: object
    max_depth: int
    nodes_explored: int


def _parties_for(cfg: SearchConfig, last_party, depth):
    order = cfg.party_order
    if order == "alice-first":
        return (ALICE,) if depth == 0 else (ALICE, BOB)
    if order == "bob-first":
        return (BOB,) if depth == 0 else (ALICE, BOB)
    if order == "alternate":
        if last_party is None:
            return (ALICE, BOB)
        return (BOB,) if last_party == ALICE else (ALICE,)
    return (ALICE, BOB)


def _matrix_rank(mat, rel_cutoff=1e-9):
    sig = np.linalg.svd(mat, compute_uv=False)
    if sig[0] <= _DUST:
        return 0
    return int(np.count_nonzero(sig > rel_cutoff * sig[0]))


def _single_state_tree(e: Ensemble) -> ProtocolTree:
    eye = np.eye(e.dim_a, dtype=np.complex128)
    meas = ProjectiveMeasurement(ALICE, (eye,))
    return Node(meas, (Leaf(e.states[0].name),))


def search_protocol(e: Ensemble, cfg: SearchConfig | None = None) -> SearchOutcome:
    """Depth-first synthesis of a discrimination protocol.

    Short-circuits through the Schmidt-sum necessary condition, then explores
    candidate measurements in deterministic order, recursing on each
    outcome's surviving states; a branch closes when a single state survives.
    A candidate must preserve orthogonality in every outcome and must make
    progress: at least two outcomes with different survivor sets, or some
    survivor's support rank strictly shrinking.  Any returned protocol has
    passed ``verify_protocol``.
    """
    from .criteria import schmidt_sum_check  # deferred: criteria builds on this module

    cfg = cfg or SearchConfig()
    tol = cfg.tolerance
    report = schmidt_sum_check(e)
    if report.violates:
        return SearchOutcome(PROVED_NO, None, report, 0, 0)

    depth_limit = min(cfg.max_depth, 2 * (e.dim_a + e.dim_b))
    stats = {"nodes": 0}

    def dfs(sub: Ensemble, depth: int, last_party) -> ProtocolTree | None:
        stats["nodes"] += 1
        if depth >= depth_limit:
            return None
        ranks = {s.name: _matrix_rank(s.amplitudes) for s in sub.states}
        full = frozenset(sub.labels)
        for party in _parties_for(cfg, last_party, depth):
            for meas in candidate_bases(sub, party, cfg):
                if not valid_measurement(sub, meas, tol):
                    continue
                children_ens = []
                usable = True
                for q in meas.projectors:
                    try:
                        children_ens.append(surviving_states(sub, party, q, tol))
                    except EmptyOutcome:
                        children_ens.append(None)
                    except NotOrthogonal:
                        usable = False
                        break
                if not usable:
                    continue
                firing = [c for c in children_ens if c is not None]
                if len(firing) < 2:
                    continue
                survivor_sets = {frozenset(c.labels) for c in firing}
                shrinks = any(
                    _matrix_rank(s.amplitudes) < ranks[s.name]
                    for c in firing for s in c.states
                )
                if survivor_sets == {full} and not shrinks:
                    continue
                children = []
                failed = False
                for c in children_ens:
                    if c is None:
                        children.append(Leaf(None))
                    elif c.m == 1:
                        children.append(Leaf(c.states[0].name))
                    else:
                        subtree = dfs(c, depth + 1, party)
                        if subtree is None:
                            failed = True
                            break
                        children.append(subtree)
                if failed:
                    continue
                return Node(meas, tuple(children))
        return None

    if e.m == 1:
        tree = _single_state_tree(e)
    else:
        tree = dfs(e, 0, None)
    if tree is None:
        return SearchOutcome(UNKNOWN, None, report, depth_limit, stats["nodes"])
    verification = verify_protocol(tree, e, tol=tol)
    if not verification.ok:  # pragma: no cover - soundness guard
        raise RuntimeError(
            "internal error: search returned a protocol that fails verification: "
            + "; ".join(verification.failures))
    return SearchOutcome(YES, tree, report, depth_limit, stats["nodes"])
