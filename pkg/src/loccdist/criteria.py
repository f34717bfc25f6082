"""Decision criteria for local distinguishability.

Three layers: a cheap necessary condition (the Schmidt ranks of a reliably
distinguishable ensemble sum to at most the joint dimension), certificate
checking (each state written as a superposition of its own share of a
locally distinguishable orthogonal product-vector set), and the complete
classification for two-qubit ensembles.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ensemble import Ensemble, make_ensemble
from .errors import (
    BadAssignment,
    EmptyOutcome,
    ProductSetNotDistinguishable,
    ReconstructionFailure,
    VectorsNotOrthogonal,
    WrongDimensions,
    ZeroState,
)
from .protocol import (
    ALICE,
    BOB,
    Leaf,
    Node,
    ProjectiveMeasurement,
    ProtocolTree,
    VerificationReport,
    verify_protocol,
)
from .search import (
    YES,
    SearchConfig,
    SearchOutcome,
    search_protocol,
    surviving_states,
)
from .states import (
    DEFAULT_TOL,
    RANK_CUTOFF,
    product_state,
    schmidt_decompose,
)

VIOLATES_NECESSARY = "violates-necessary"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SchmidtSumReport:
    """Schmidt ranks of the ensemble members against the joint capacity.

    ``violates`` (verdict "violates-necessary") proves the ensemble cannot be
    reliably distinguished by local measurements and classical communication;
    the converse does not hold.
    """

    schmidt_numbers: tuple[int, ...]
    total: int
    capacity: int
    verdict: str

    @property
    def violates(self) -> bool:
        return self.verdict == VIOLATES_NECESSARY


def schmidt_sum_check(e: Ensemble) -> SchmidtSumReport:
    """Necessary condition: sum of Schmidt ranks must not exceed dim_a*dim_b."""
    numbers = tuple(schmidt_decompose(s).schmidt_number for s in e.states)
    total = int(sum(numbers))
    capacity = e.dim_a * e.dim_b
    verdict = VIOLATES_NECESSARY if total > capacity else INCONCLUSIVE
    return SchmidtSumReport(numbers, total, capacity, verdict)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Product-decomposition certificate of distinguishability.

    ``product_vectors`` is a list of (alice, bob) local-vector pairs that are
    pairwise orthogonal as joint vectors; ``assignment`` maps every ensemble
    label to a disjoint nonempty tuple of vector indices; ``coefficients``
    gives, per label and in assignment order, the superposition coefficients
    that rebuild the state from its assigned vectors.
    """

    product_vectors: tuple
    assignment: dict
    coefficients: dict


@dataclass(frozen=True, eq=False)
class ProductSetResult:
    """Outcome of deciding local distinguishability of a product-vector set."""

    distinguishable: bool
    protocol: ProtocolTree | None
    search: SearchOutcome


def product_set_distinguishable(vectors, dims, cfg: SearchConfig | None = None,
                                tol: float = DEFAULT_TOL) -> ProductSetResult:
    """Search for a protocol identifying each product vector.

    ``vectors`` is a sequence of (alice, bob) pairs, pairwise orthogonal as
    joint vectors (``NotOrthogonal`` otherwise).  A negative result only
    means the bounded search was exhausted, not impossibility.
    """
    dim_a, dim_b = dims
    states = [product_state(dim_a, dim_b, a, b, name=f"v{k}")
              for k, (a, b) in enumerate(vectors)]
    ens = make_ensemble(states, tol=tol)
    outcome = search_protocol(ens, cfg)
    return ProductSetResult(outcome.verdict == YES, outcome.protocol, outcome)


@dataclass(frozen=True, eq=False)
class CertificateReport:
    """Successful certificate validation, with the protocols it induces."""

    labels: tuple[str, ...]
    vector_count: int
    max_pairwise_overlap: float
    reconstruction_errors: dict
    product_protocol: ProtocolTree
    ensemble_protocol: ProtocolTree
    verification: VerificationReport


def _relabel_leaves(tree: ProtocolTree, owner: dict) -> ProtocolTree:
    if isinstance(tree, Leaf):
        if tree.identify is None:
            return tree
        return Leaf(owner.get(tree.identify))
    return Node(tree.measurement,
                tuple(_relabel_leaves(c, owner) for c in tree.children))


def certificate_check(e: Ensemble, cert: Certificate,
                      cfg: SearchConfig | None = None,
                      tol: float = DEFAULT_TOL) -> CertificateReport:
    """Validate a certificate; success proves the ensemble distinguishable.

    Checks, in order: the assignment structure (``BadAssignment``), pairwise
    joint orthogonality of the product vectors (``VectorsNotOrthogonal``),
    reconstruction of every state from its assigned vectors
    (``ReconstructionFailure``), and local distinguishability of the vector
    set (``ProductSetNotDistinguishable``).  On success the product-set
    protocol is relabeled into an ensemble protocol and re-verified.
    """
    n = len(cert.product_vectors)
    labels = set(e.labels)
    if set(cert.assignment) != labels:
        missing = labels - set(cert.assignment)
        extra = set(cert.assignment) - labels
        raise BadAssignment(f"assignment labels mismatch (missing {sorted(missing)}, "
                            f"unknown {sorted(extra)})")
    seen: dict[int, str] = {}
    for label, indices in cert.assignment.items():
        if not indices:
            raise BadAssignment(f"state {label!r} has an empty assignment")
        for idx in indices:
            if not 0 <= idx < n:
                raise BadAssignment(f"state {label!r} references vector {idx} "
                                    f"out of range 0..{n - 1}")
            if idx in seen:
                raise BadAssignment(f"vector {idx} assigned to both {seen[idx]!r} "
                                    f"and {label!r}")
            seen[idx] = label
        coeffs = cert.coefficients.get(label)
        if coeffs is None or len(coeffs) != len(indices):
            raise BadAssignment(f"state {label!r} needs one coefficient per "
                                f"assigned vector")

    vecs = []
    for k, (a, b) in enumerate(cert.product_vectors):
        a = np.asarray(a, dtype=np.complex128).reshape(-1)
        b = np.asarray(b, dtype=np.complex128).reshape(-1)
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na < 1e-12 or nb < 1e-12:
            raise ZeroState(f"product vector {k} has a zero factor")
        vecs.append((a / na, b / nb))

    max_overlap = 0.0
    for i, j in combinations(range(n), 2):
        overlap = abs(np.vdot(vecs[i][0], vecs[j][0]) * np.vdot(vecs[i][1], vecs[j][1]))
        max_overlap = max(max_overlap, overlap)
        if overlap > tol:
            raise VectorsNotOrthogonal(
                f"product vectors {i} and {j} overlap ({overlap:.3g} > {tol:.3g})",
                pair=(i, j), overlap=overlap)

    errors = {}
    for label, indices in cert.assignment.items():
        target = e.state(label).amplitudes
        rebuilt = np.zeros_like(target)
        for idx, coeff in zip(indices, cert.coefficients[label]):
            a, b = vecs[idx]
            rebuilt += complex(coeff) * np.outer(a, b)
        err = float(np.linalg.norm(rebuilt - target))
        errors[label] = err
        if err > tol:
            raise ReconstructionFailure(
                f"state {label!r} not reproduced by its assigned vectors "
                f"(error {err:.3g})")

    result = product_set_distinguishable(vecs, e.dims, cfg, tol=tol)
    if not result.distinguishable:
        raise ProductSetNotDistinguishable(
            f"no protocol found for the certificate's product set "
            f"(search exhausted at depth {result.search.max_depth}, "
            f"{result.search.nodes_explored} nodes)")

    owner = {f"v{idx}": label for idx, label in seen.items()}
    refined = _relabel_leaves(result.protocol, owner)
    verification = verify_protocol(refined, e, tol=tol)
    if not verification.ok:  # pragma: no cover - guaranteed by the checks above
        raise RuntimeError("internal error: relabeled certificate protocol fails "
                           "verification: " + "; ".join(verification.failures))
    return CertificateReport(
        labels=e.labels,
        vector_count=n,
        max_pairwise_overlap=max_overlap,
        reconstruction_errors=errors,
        product_protocol=result.protocol,
        ensemble_protocol=refined,
        verification=verification,
    )


@dataclass(frozen=True, eq=False)
class Classification:
    """Two-qubit classification verdict.

    Distinguishable verdicts always carry a protocol that passed
    ``verify_protocol``; ``warnings`` lists states whose smallest singular
    value sits near the rank cutoff (their product/entangled call is
    numerically borderline).
    """

    distinguishable: bool
    protocol: ProtocolTree | None
    reason: str | None
    warnings: tuple[str, ...]
    schmidt_report: SchmidtSumReport


def _borderline_warnings(e: Ensemble) -> tuple[str, ...]:
    out = []
    for s in e.states:
        sig = np.linalg.svd(s.amplitudes, compute_uv=False)
        cut = RANK_CUTOFF * sig[0]
        smallest = sig[-1]
        if cut / 10 < smallest <= 10 * cut:
            out.append(f"state {s.name!r}: smallest singular value {smallest:.3g} "
                       f"is within 10x of the rank cutoff {cut:.3g}")
    return tuple(out)


def _perp2(v: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(v[1]), np.conj(v[0])])


def _rank1_meas(party, v0, v1) -> ProjectiveMeasurement:
    return ProjectiveMeasurement(party, (v0.reshape(-1, 1), v1.reshape(-1, 1)))


def _three_state_protocol(e: Ensemble, decomps, tol) -> ProtocolTree | None:
    """Constructive protocol for three two-qubit states with <=1 entangled.

    Pick a pair of product states whose factors on one side are orthogonal
    (such a pair always exists); measuring that side in those two factors
    leaves, per outcome, at most the owning product state plus the third
    state's component, whose other-side factors are orthogonal by the
    ensemble's orthogonality, so one more rank-one measurement finishes.
    """
    ranks = [d.schmidt_number for d in decomps]
    products = [i for i, r in enumerate(ranks) if r == 1]
    alice = {i: decomps[i].alice_vectors[0] for i in products}
    bob = {i: decomps[i].bob_vectors[0] for i in products}

    party = None
    pair = None
    for i, j in combinations(products, 2):
        if abs(np.vdot(alice[i], alice[j])) <= tol:
            party, pair = ALICE, (i, j)
            break
    if party is None:
        for i, j in combinations(products, 2):
            if abs(np.vdot(bob[i], bob[j])) <= tol:
                party, pair = BOB, (i, j)
                break
    if party is None:
        return None

    axis = alice if party == ALICE else bob
    other_axis = bob if party == ALICE else alice
    other_party = BOB if party == ALICE else ALICE

    children = []
    for owner_idx in pair:
        v = axis[owner_idx]
        try:
            sub = surviving_states(e, party, v, tol=tol)
        except EmptyOutcome:  # pragma: no cover - the owner always survives
            children.append(Leaf(None))
            continue
        owner_label = e.states[owner_idx].name
        if sub.m == 1:
            children.append(Leaf(sub.states[0].name))
            continue
        rider_label = next(lbl for lbl in sub.labels if lbl != owner_label)
        anchor = other_axis[owner_idx]
        meas2 = _rank1_meas(other_party, anchor, _perp2(anchor))
        children.append(Node(meas2, (Leaf(owner_label), Leaf(rider_label))))

    i, j = pair
    meas1 = _rank1_meas(party, axis[i], axis[j])
    return Node(meas1, tuple(children))


def classify_2x2(e: Ensemble, cfg: SearchConfig | None = None,
                 tol: float = DEFAULT_TOL) -> Classification:
    """Complete classification of two-qubit ensembles.

    One or two states are always distinguishable; three are distinguishable
    iff at most one is entangled; four iff all four are product states.
    Distinguishable verdicts return a verified protocol (constructed for the
    three-state case, found by search otherwise).
    """
    if e.dims != (2, 2):
        raise WrongDimensions(f"classify_2x2 needs a 2x2 ensemble, got "
                              f"{e.dim_a}x{e.dim_b}")
    report = schmidt_sum_check(e)
    warnings = _borderline_warnings(e)
    decomps = [schmidt_decompose(s) for s in e.states]
    entangled = [s.name for s, d in zip(e.states, decomps) if d.schmidt_number > 1]

    if e.m == 3 and len(entangled) > 1:
        return Classification(
            False, None,
            f"three states are distinguishable only when at most one is "
            f"entangled; found {len(entangled)} ({', '.join(entangled)})",
            warnings, report)
    if e.m == 4 and entangled:
        return Classification(
            False, None,
            f"four states are distinguishable only when all are product "
            f"states; entangled: {', '.join(entangled)}",
            warnings, report)

    protocol = None
    if e.m == 3:
        protocol = _three_state_protocol(e, decomps, tol)
        if protocol is not None and not verify_protocol(protocol, e, tol=tol).ok:
            protocol = None  # fall back to search on numerical trouble
    if protocol is None:
        outcome = search_protocol(e, cfg)
        if outcome.verdict != YES:  # pragma: no cover - rule guarantees success
            raise RuntimeError(
                f"internal error: classification says distinguishable but the "
                f"search returned {outcome.verdict} on {e!r}")
        protocol = outcome.protocol
    return Classification(True, protocol, None, warnings, report)
