"""Protocol trees of local projective measurements with classical communication.

A protocol is a finite tree.  Each internal node holds a complete orthogonal
projective measurement performed by one party; the node has one child per
outcome, and descending into a child models the classical broadcast of that
outcome.  Leaves either announce an ensemble member (identify) or mark a dead
branch (fail).  Running a tree on an ensemble accumulates, per root-to-leaf
branch, the ordered product of the projectors each party applied; the
positive operator built from that product is the branch's measurement
element, and the elements of all branches resolve the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble
from .errors import (
    DimensionMismatch,
    MalformedTree,
    NotUnitary,
    UnknownProtocol,
)
from .states import DEFAULT_TOL, make_state, _frozen

ALICE = "A"
BOB = "B"
PARTIES = (ALICE, BOB)


def _as_columns(block) -> np.ndarray:
    q = np.asarray(block, dtype=np.complex128)
    if q.ndim == 1:
        q = q[:, np.newaxis]
    if q.ndim != 2 or q.shape[1] == 0:
        raise NotUnitary("each projector must be a nonempty matrix of columns")
    return q


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete orthogonal projective measurement of one party's local space.

    Each outcome subspace is given as a matrix of orthonormal columns; the
    subspaces must be mutually orthogonal and their column counts must sum to
    the local dimension, so the outcome projectors resolve the identity.
    """

    party: str
    projectors: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.party not in PARTIES:
            raise MalformedTree(f"party must be one of {PARTIES}, got {self.party!r}")
        if not self.projectors:
            raise NotUnitary("a measurement needs at least one outcome")
        blocks = tuple(_frozen(_as_columns(q)) for q in self.projectors)
        dim = blocks[0].shape[0]
        total = 0
        for k, q in enumerate(blocks):
            if q.shape[0] != dim:
                raise NotUnitary("all projectors must act on the same local space")
            dev = np.abs(q.conj().T @ q - np.eye(q.shape[1])).max()
            if dev > self.tol:
                raise NotUnitary(
                    f"outcome {k}: projector columns not orthonormal (deviation {dev:.3g})"
                )
            total += q.shape[1]
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                dev = np.abs(blocks[i].conj().T @ blocks[j]).max()
                if dev > self.tol:
                    raise NotUnitary(
                        f"outcomes {i} and {j} are not orthogonal (overlap {dev:.3g})"
                    )
        if total != dim:
            raise NotUnitary(
                f"projector ranks sum to {total}, expected the local dimension {dim}"
            )
        object.__setattr__(self, "projectors", blocks)

    @property
    def local_dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def outcomes(self) -> int:
        return len(self.projectors)

    def projector_matrices(self) -> list[np.ndarray]:
        return [q @ q.conj().T for q in self.projectors]


@dataclass(frozen=True, eq=False)
class Leaf:
    """Terminal node: identify a state by label, or fail (identify=None)."""

    identify: str | None = None

    @property
    def is_fail(self) -> bool:
        return self.identify is None


@dataclass(frozen=True, eq=False)
class Node:
    """Internal node: one measurement, one child per outcome."""

    measurement: ProjectiveMeasurement
    children: tuple

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) != self.measurement.outcomes:
            raise MalformedTree(
                f"{self.measurement.outcomes} outcomes but {len(children)} children"
            )
        for c in children:
            if not isinstance(c, (Leaf, Node)):
                raise MalformedTree(f"child of unexpected type {type(c).__name__}")
        object.__setattr__(self, "children", children)


#: a protocol tree is either a Leaf or a Node
ProtocolTree = Leaf | Node


def tree_depth(tree: ProtocolTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(c) for c in tree.children)


@dataclass(frozen=True, eq=False)
class BranchOperator:
    """Accumulated per-party operator products along one root-to-leaf branch.

    For protocols whose later measurements refine earlier ones (all canned
    protocols and everything this package constructs), ``op_a`` and ``op_b``
    are orthogonal projectors.
    """

    op_a: np.ndarray
    op_b: np.ndarray
    leaf_label: str | None
    path: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "op_a", _frozen(self.op_a))
        object.__setattr__(self, "op_b", _frozen(self.op_b))

    def is_projector(self, tol: float = DEFAULT_TOL) -> bool:
        """Whether both accumulated operators satisfy P @ P = P = P^dagger."""
        for op in (self.op_a, self.op_b):
            if np.abs(op @ op - op).max() > tol or np.abs(op - op.conj().T).max() > tol:
                return False
        return True


@dataclass(frozen=True, eq=False)
class GpovmElement:
    """Positive branch element, stored factored as (op_a^+ op_a, op_b^+ op_b)."""

    factor_a: np.ndarray
    factor_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "factor_a", _frozen(self.factor_a))
        object.__setattr__(self, "factor_b", _frozen(self.factor_b))

    @classmethod
    def from_branch(cls, branch: BranchOperator) -> "GpovmElement":
        return cls(branch.op_a.conj().T @ branch.op_a, branch.op_b.conj().T @ branch.op_b)

    def joint(self) -> np.ndarray:
        return np.kron(self.factor_a, self.factor_b)


def _check_node_dims(meas: ProjectiveMeasurement, dims) -> None:
    expected = dims[0] if meas.party == ALICE else dims[1]
    if meas.local_dim != expected:
        raise MalformedTree(
            f"party {meas.party} measurement acts on dim {meas.local_dim}, "
            f"expected {expected}"
        )


def enumerate_branches(tree: ProtocolTree, dims) -> list[BranchOperator]:
    """One BranchOperator per leaf, in depth-first path order."""
    dim_a, dim_b = dims
    out: list[BranchOperator] = []

    def walk(node, op_a, op_b, path):
        if isinstance(node, Leaf):
            out.append(BranchOperator(op_a, op_b, node.identify, path))
            return
        meas = node.measurement
        _check_node_dims(meas, dims)
        for k, q in enumerate(meas.projectors):
            p = q @ q.conj().T
            if meas.party == ALICE:
                walk(node.children[k], p @ op_a, op_b, path + ((ALICE, k),))
            else:
                walk(node.children[k], op_a, p @ op_b, path + ((BOB, k),))

    walk(tree, np.eye(dim_a, dtype=np.complex128), np.eye(dim_b, dtype=np.complex128), ())
    return out


def completeness_check(branches) -> float:
    """Max-magnitude entry of (sum of branch elements - identity)."""
    branches = list(branches)
    if not branches:
        raise MalformedTree("no branches to check")
    da = branches[0].op_a.shape[0]
    db = branches[0].op_b.shape[0]
    total = np.zeros((da * db, da * db), dtype=np.complex128)
    for b in branches:
        total += GpovmElement.from_branch(b).joint()
    return float(np.abs(total - np.eye(da * db)).max())


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    """Per-leaf arrival data: probabilities and renormalized post-states.

    ``probabilities`` follows the ensemble's state order; ``post_states``
    holds None where the arrival probability is at or below tolerance.
    """

    branch: BranchOperator
    probabilities: np.ndarray
    post_states: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).copy()
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "post_states", tuple(self.post_states))


def run_protocol(tree: ProtocolTree, e: Ensemble, tol: float = DEFAULT_TOL):
    """Propagate every ensemble member through the tree.

    Returns one OutcomeRecord per leaf in depth-first order; probabilities
    below ``tol`` are floored to exactly zero.
    """
    records: list[OutcomeRecord] = []

    def walk(node, mats, op_a, op_b, path):
        if isinstance(node, Leaf):
            probs = np.array([float(np.linalg.norm(m) ** 2) for m in mats])
            probs[probs <= tol] = 0.0
            post = tuple(
                make_state(e.dim_a, e.dim_b, m, name=s.name) if p > 0.0 else None
                for m, p, s in zip(mats, probs, e.states)
            )
            records.append(OutcomeRecord(BranchOperator(op_a, op_b, node.identify, path),
                                         probs, post))
            return
        meas = node.measurement
        try:
            _check_node_dims(meas, e.dims)
        except MalformedTree as exc:
            raise DimensionMismatch(str(exc)) from exc
        for k, q in enumerate(meas.projectors):
            p = q @ q.conj().T
            if meas.party == ALICE:
                walk(node.children[k], [p @ m for m in mats], p @ op_a, op_b,
                     path + ((ALICE, k),))
            else:
                walk(node.children[k], [m @ p.T for m in mats], op_a, p @ op_b,
                     path + ((BOB, k),))

    eye_a = np.eye(e.dim_a, dtype=np.complex128)
    eye_b = np.eye(e.dim_b, dtype=np.complex128)
    walk(tree, [s.amplitudes for s in e.states], eye_a, eye_b, ())
    return records


def format_path(path) -> str:
    return "/".join(f"{party}:{k}" for party, k in path) or "(root)"


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Outcome of checking a protocol against an ensemble.

    Success requires (a) the branch elements to resolve the identity within
    tolerance, (b) every leaf with any arrival to identify exactly the single
    state arriving there, and (c) every state to reach leaves labeled with it
    with total probability 1.
    """

    ok: bool
    completeness_deviation: float
    state_totals: dict
    leaves: tuple
    failures: tuple
    tolerance: float = DEFAULT_TOL


def verify_protocol(tree: ProtocolTree, e: Ensemble, tol: float = DEFAULT_TOL) -> VerificationReport:
    records = run_protocol(tree, e, tol=tol)
    deviation = completeness_check([r.branch for r in records])
    failures = []
    if deviation > tol:
        failures.append(f"branch elements do not resolve the identity (deviation {deviation:.3g})")

    labels = e.labels
    totals = {lbl: 0.0 for lbl in labels}
    rows = []
    for r in records:
        probs = {lbl: float(p) for lbl, p in zip(labels, r.probabilities)}
        arrivals = [lbl for lbl, p in probs.items() if p > tol]
        leaf_label = r.branch.leaf_label
        rows.append((r.branch.path, leaf_label, probs))
        where = format_path(r.branch.path)
        if leaf_label is None:
            if arrivals:
                failures.append(f"leaf {where}: fail leaf reached by {arrivals}")
            continue
        if leaf_label not in labels:
            failures.append(f"leaf {where}: unknown label {leaf_label!r}")
            continue
        totals[leaf_label] += probs[leaf_label]
        extra = [lbl for lbl in arrivals if lbl != leaf_label]
        if extra:
            failures.append(
                f"leaf {where}: labeled {leaf_label!r} but also reached by {extra}"
            )
    for lbl, total in totals.items():
        if abs(total - 1.0) > tol:
            failures.append(f"state {lbl!r} is identified with total probability {total:.12g}")

    return VerificationReport(
        ok=not failures,
        completeness_deviation=deviation,
        state_totals=totals,
        leaves=tuple(rows),
        failures=tuple(failures),
        tolerance=tol,
    )


def _cols(dim, *indices):
    out = np.zeros((dim, len(indices)), dtype=np.complex128)
    for c, i in enumerate(indices):
        out[i, c] = 1.0
    return out


def _col(vec):
    return np.asarray(vec, dtype=np.complex128).reshape(-1, 1)


def canned_protocol(name: str) -> ProtocolTree:
    """Named example protocols: "six4x4" and "bell2-x".

    "six4x4" pairs with the six-state 4x4 example ensemble: Alice first
    splits {0,1} vs {2,3}; inside the first block Alice refines to {|0>,|1>}
    and Bob finishes in the computational or +/- basis per branch; the second
    block mirrors this with the parties swapped.  Outcome subspaces no state
    can reach carry fail leaves.  "bell2-x" distinguishes the first two Bell
    states by X-basis measurements on both sides.
    """
    if name == "six4x4":
        s2 = 1.0 / np.sqrt(2.0)
        plus01 = np.array([s2, s2, 0, 0])
        minus01 = np.array([s2, -s2, 0, 0])
        plus23 = np.array([0, 0, s2, s2])
        minus23 = np.array([0, 0, s2, -s2])

        bob_under_a0 = Node(
            ProjectiveMeasurement(BOB, (_cols(4, 0), _cols(4, 1), _cols(4, 2, 3))),
            (Leaf("psi1"), Leaf("psi3"), Leaf(None)),
        )
        bob_under_a1 = Node(
            ProjectiveMeasurement(BOB, (_col(plus01), _col(minus01), _cols(4, 2, 3))),
            (Leaf("psi2"), Leaf("psi3"), Leaf(None)),
        )
        first_block = Node(
            ProjectiveMeasurement(ALICE, (_cols(4, 0), _cols(4, 1), _cols(4, 2, 3))),
            (bob_under_a0, bob_under_a1, Leaf(None)),
        )
        alice_under_b2 = Node(
            ProjectiveMeasurement(ALICE, (_cols(4, 2), _cols(4, 3), _cols(4, 0, 1))),
            (Leaf("psi4"), Leaf("psi6"), Leaf(None)),
        )
        alice_under_b3 = Node(
            ProjectiveMeasurement(ALICE, (_col(plus23), _col(minus23), _cols(4, 0, 1))),
            (Leaf("psi5"), Leaf("psi6"), Leaf(None)),
        )
        second_block = Node(
            ProjectiveMeasurement(BOB, (_cols(4, 2), _cols(4, 3), _cols(4, 0, 1))),
            (alice_under_b2, alice_under_b3, Leaf(None)),
        )
        return Node(
            ProjectiveMeasurement(ALICE, (_cols(4, 0, 1), _cols(4, 2, 3))),
            (first_block, second_block),
        )

    if name == "bell2-x":
        s2 = 1.0 / np.sqrt(2.0)
        plus = np.array([s2, s2])
        minus = np.array([s2, -s2])
        bob_x = ProjectiveMeasurement(BOB, (_col(plus), _col(minus)))
        under_plus = Node(bob_x, (Leaf("A1"), Leaf("A2")))
        under_minus = Node(bob_x, (Leaf("A2"), Leaf("A1")))
        return Node(ProjectiveMeasurement(ALICE, (_col(plus), _col(minus))),
                    (under_plus, under_minus))

    raise UnknownProtocol(f"unknown protocol {name!r}; known: six4x4, bell2-x")
