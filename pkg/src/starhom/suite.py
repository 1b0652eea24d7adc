"""The verification suite: every acceptance check as replayable data.

Each criterion draws its corpus from random.Random(f"{seed}:{id}"), so a
report is reproduced byte-for-byte by rerunning with the same seed.  All
comparisons are exact rational equality inside the stated truncation
windows; no tolerances exist anywhere.

The last criterion guards against vacuous checks: it reruns the battery to
confirm byte-stable output, then flips the sign in the star-product kernel
and demands that the bracket normalization (or associativity) check fails
under the mutation.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import charclass, fedosov, hkr
from .corpus import random_chain, random_poly, random_rees, random_weyl
from .hochschild import (
    AlgebraMorphism,
    HochschildChain,
    diff_B,
    diff_b,
    induced_chain_map,
    phi_A,
    phi_E,
    poly_handle,
    rees_handle,
    weyl_handle,
)
from .rees import (
    OpSeries,
    localized_to_weyl,
    rees_from_localized,
    rees_iota,
    rees_sigma,
)
from .series import Poly, TSeries
from .weyl import (
    WeylElement,
    gl_embed,
    lie_bracket,
    moyal_star,
    star_commutator,
    weyl_gens,
)

VERIFIED = "verified"
VIOLATED = "violated"
ERROR = "error"


@dataclass
class CheckResult:
    id: str
    name: str
    status: str
    details: list = field(default_factory=list)
    precision: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "status": self.status,
            "details": self.details,
            "precision": self.precision,
        }


@dataclass
class Report:
    status: str
    seed: int
    scale: str
    checks: list

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "seed": self.seed,
            "scale": self.scale,
            "checks": [c.to_json_dict() for c in sorted(self.checks, key=lambda c: c.id)],
        }

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2).encode()


def _result(cid, name, failures, precision) -> CheckResult:
    return CheckResult(
        id=cid,
        name=name,
        status=VERIFIED if not failures else VIOLATED,
        details=failures,
        precision=precision,
    )


def _rng(seed: int, cid: str) -> random.Random:
    return random.Random(f"{seed}:{cid}")


# -- criteria -------------------------------------------------------------------


def check_moyal_associativity(seed: int, scale: str, mutate: bool = False) -> CheckResult:
    cid, name = "C01", "moyal-associativity"
    rng = _rng(seed, cid)
    trunc = 6
    count = 100 if scale == "small" else 300
    failures = []
    for n in range(count):
        d = rng.choice((1, 2))
        f, g, h = (
            WeylElement.from_poly(
                random_poly(rng, weyl_gens(d), max_degree=4, terms=3), d, trunc
            )
            for _ in range(3)
        )
        lhs = moyal_star(
            moyal_star(f, g, mutate_kernel_sign=mutate), h, mutate_kernel_sign=mutate
        )
        rhs = moyal_star(
            f, moyal_star(g, h, mutate_kernel_sign=mutate), mutate_kernel_sign=mutate
        )
        if not (lhs - rhs).is_zero():
            failures.append(
                {"case": n, "dim": d, "left": repr(lhs.value), "right": repr(rhs.value)}
            )
    return _result(cid, name, failures, {"trunc_t": trunc, "triples": count})


def check_bracket_normalization(seed: int, scale: str, mutate: bool = False) -> CheckResult:
    cid, name = "C02", "star-bracket-normalization"
    failures = []
    for d in (1, 2, 3):
        gens = weyl_gens(d)
        lifts = [WeylElement.from_poly(Poly.gen(gens, g), d, 4) for g in gens]
        for i in range(d):
            for j in range(d):
                got = star_commutator(lifts[i], lifts[d + j], mutate_kernel_sign=mutate)
                want = WeylElement.from_poly(
                    Poly.const(gens, -1 if i == j else 0), d, got.value.trunc, t_exp=1
                )
                if not (got - want).is_zero():
                    failures.append(
                        {"dim": d, "bracket": f"[x{i+1}, xi{j+1}]", "got": repr(got.value)}
                    )
        for block in (lifts[:d], lifts[d:]):
            for a, b in itertools.combinations(block, 2):
                got = star_commutator(a, b, mutate_kernel_sign=mutate)
                if not got.is_zero():
                    failures.append({"dim": d, "bracket": "same-block", "got": repr(got.value)})
    return _result(cid, name, failures, {"trunc_t": 4, "dims": [1, 2, 3]})


def check_hochschild_identities(seed: int, scale: str) -> CheckResult:
    cid, name = "C03", "hochschild-differential-identities"
    rng = _rng(seed, cid)
    per_handle = 100 if scale == "small" else 200
    trunc = 9
    gens3 = ("x", "y", "z")
    ph = poly_handle(gens3)
    wh = weyl_handle(1, trunc=trunc)
    failures = []

    def poly_slot(r):
        return random_poly(r, gens3, max_degree=2, terms=2, nonzero=True)

    def weyl_slot(r):
        return random_weyl(r, 1, trunc, max_degree=2, terms=2)

    for handle, slot in ((ph, poly_slot), (wh, weyl_slot)):
        for n in range(per_handle):
            degree = rng.randint(1, 4)
            c = random_chain(rng, handle, degree, slot)
            bb = diff_b(diff_b(c))
            BB = diff_B(diff_B(c))
            anti = diff_b(diff_B(c)) + diff_B(diff_b(c))
            for label, chain in (("b^2", bb), ("B^2", BB), ("bB+Bb", anti)):
                if not chain.is_zero():
                    failures.append(
                        {"case": n, "algebra": handle.kind, "identity": label}
                    )
    return _result(
        cid, name, failures, {"chains_per_algebra": per_handle, "trunc_t": trunc}
    )


def check_trace_cycles(seed: int, scale: str) -> CheckResult:
    cid, name = "C04", "trace-cycles-are-cycles"
    failures = []
    for d in (1, 2):
        for label, chain in (("phi_E", phi_E(d)), ("phi_A", phi_A(d))):
            image = diff_b(chain)
            if not image.is_zero():
                failures.append({"dim": d, "cycle": label, "b_image_words": image.term_count()})
    return _result(cid, name, failures, {"dims": [1, 2], "words_d2": 24})


def _weyl_loc_coeff_from_ops(c: OpSeries, dim: int, trunc: int) -> WeylElement:
    gens = weyl_gens(dim)
    coeffs = {p: Poly.const(gens, op.constant_term()) for p, op in c.comps.items()}
    lower = min([0] + list(c.comps))
    return WeylElement(TSeries(gens, coeffs, lower, trunc), dim)


def localization_morphism(dim: int, trunc: int = 3) -> AlgebraMorphism:
    """The algebra map x -> x, t d -> xi on the Laurent model, as a chain map."""
    return AlgebraMorphism(
        source=rees_handle(dim),
        target=weyl_handle(dim, trunc=trunc, localized=True),
        element_map=lambda s: localized_to_weyl(s, trunc=trunc),
        coeff_map=lambda c: _weyl_loc_coeff_from_ops(c, dim, trunc),
    )


def check_chain_map_compatibility(seed: int, scale: str) -> CheckResult:
    cid, name = "C05", "trace-cycle-chain-map-compatibility"
    failures = []
    for d in (1, 2):
        image = induced_chain_map(localization_morphism(d), phi_E(d))
        if image != phi_A(d):
            failures.append({"dim": d, "note": "image of phi_E differs from phi_A"})
    return _result(cid, name, failures, {"dims": [1, 2], "trunc_t": 3})


def check_hkr_chain_map(seed: int, scale: str) -> CheckResult:
    cid, name = "C06", "hkr-chain-map"
    rng = _rng(seed, cid)
    count = 200 if scale == "small" else 400
    gens = ("x", "y", "z")
    ph = poly_handle(gens)
    failures = []
    x, y, one = Poly.gen(gens, "x"), Poly.gen(gens, "y"), Poly.const(gens, 1)
    normalization = hkr.hkr_map(HochschildChain.single(ph, (one, x, y)))
    want = hkr.wedge(hkr.DForm.d_gen(gens, 0), hkr.DForm.d_gen(gens, 1)).scale(
        Fraction(1, 2)
    )
    if normalization != want:
        failures.append({"case": "normalization", "got": repr(normalization)})

    def slot(r):
        return random_poly(r, gens, max_degree=2, terms=2, nonzero=True)

    for n in range(count):
        degree = rng.randint(1, 4)
        c = random_chain(rng, ph, degree, slot)
        if not hkr.hkr_map(diff_b(c)).is_zero():
            failures.append({"case": n, "identity": "hkr b = 0"})
        if hkr.hkr_map(diff_B(c)) != hkr.de_rham(hkr.hkr_map(c)):
            failures.append({"case": n, "identity": "hkr B = d hkr"})
    return _result(cid, name, failures, {"chains": count, "variables": 3})


def check_rr_identity(seed: int, scale: str) -> CheckResult:
    cid, name = "C07", "todd-equals-ahat-times-exp-half-c1"
    failures = []
    rep1 = charclass.rr_identity_check(1, 8)
    if not rep1.equal:
        failures.append({"dim": 1, "max_deg": 8, "mismatches": len(rep1.mismatches)})
    for d in (1, 2, 3):
        rep = charclass.rr_identity_check(d, 4)
        if not rep.equal:
            failures.append({"dim": d, "max_deg": 4, "mismatches": len(rep.mismatches)})
    cn = charclass.chern_names(3)
    c1, c2 = Poly.gen(cn, "c1"), Poly.gen(cn, "c2")
    td = charclass.to_chern_basis(charclass.todd(3, 3)).poly
    frozen = {
        1: c1 * Fraction(1, 2),
        2: (c1 * c1 + c2) * Fraction(1, 12),
        3: c1 * c2 * Fraction(1, 24),
    }
    weights = (1, 2, 3)
    for deg, want in frozen.items():
        got = Poly(
            cn,
            {
                e: q
                for e, q in td.terms.items()
                if sum(a * w for a, w in zip(e, weights)) == deg
            },
        )
        if got != want:
            failures.append({"todd_degree": 2 * deg, "got": repr(got), "want": repr(want)})
    return _result(cid, name, failures, {"per_root_degree": 8, "c_basis_degree": 4})


def check_gl_embedding(seed: int, scale: str) -> CheckResult:
    cid, name = "C08", "gl-embedding-with-trace-correction"
    rng = _rng(seed, cid)
    pairs = 50 if scale == "small" else 150
    failures = []
    gens = weyl_gens(1)
    got = gl_embed([[1]], 1, trunc=6)
    want = WeylElement(
        TSeries(
            gens,
            {-1: Poly.monomial(gens, (1, 1), 1), 0: Poly.const(gens, Fraction(-1, 2))},
            -1,
            6,
        ),
        1,
    )
    if not (got.value - want).is_zero():
        failures.append({"case": "E11", "got": repr(got.value.value)})

    def rmat(r):
        return [[r.randint(-4, 4) for _ in range(2)] for _ in range(2)]

    for n in range(pairs):
        a, b = rmat(rng), rmat(rng)
        ab_minus_ba = [
            [
                sum(a[i][k] * b[k][j] - b[i][k] * a[k][j] for k in range(2))
                for j in range(2)
            ]
            for i in range(2)
        ]
        lhs = lie_bracket(gl_embed(a, 2, trunc=6), gl_embed(b, 2, trunc=6))
        rhs = gl_embed(ab_minus_ba, 2, trunc=5)
        if not (lhs.value - rhs.value).is_zero():
            failures.append({"case": n, "a": a, "b": b})
    return _result(cid, name, failures, {"pairs": pairs, "trunc_t": 6})


def check_fedosov_curvature(seed: int, scale: str) -> CheckResult:
    cid, name = "C09", "fedosov-lift-curvature-identity"
    failures = []
    fiber_deg = 4
    base = ("z1", "z2")
    z2p = Poly.gen(base, "z2")
    e11 = fedosov.gl_to_vf([[1, 0], [0, 0]], 2, fiber_deg + 4)
    a0 = fedosov.LieValuedForm.from_entries(base, "vf", [((0,), z2p, e11)])
    assembled = fedosov.kazhdan_assemble(a0, fiber_deg)
    flat_residue = fedosov.curvature(assembled.total()).fiber_truncate(fiber_deg)
    if not flat_residue.is_zero():
        failures.append({"case": "kazhdan-flatness", "residue": repr(flat_residue)})
    mform = {(0,): [[z2p, Poly.zero(base)], [Poly.zero(base), Poly.zero(base)]]}
    lifted = fedosov.lift_connection(
        assembled.total(), fedosov.half_trace_form(mform, base, 2, t_trunc=8), t_trunc=8
    )
    got = fedosov.curvature(lifted).fiber_truncate(fiber_deg)
    want = fedosov.central_scalar_form(
        base, 2, [((0, 1), Poly.const(base, Fraction(-1, 2)))], t_trunc=8
    )
    if got != want:
        failures.append({"case": "lift-curvature", "got": repr(got)})
    return _result(cid, name, failures, {"fiber_trunc": fiber_deg, "trunc_t": 8})


def check_psi_invariance(seed: int, scale: str) -> CheckResult:
    cid, name = "C10", "psi-conjugation-preserves-curvature"
    failures = []
    chart = ("z1",)
    cotangent = ("z1", "xi1")
    a0 = fedosov.LieValuedForm.from_entries(
        chart, "vf", [((0,), Poly.gen(chart, "z1"), fedosov.gl_to_vf([[1]], 1, 7))]
    )
    assembled = fedosov.kazhdan_assemble(a0, 3)
    mform = {(0,): [[Poly.gen(chart, "z1")]]}
    lifted = fedosov.lift_connection(
        assembled.total(), fedosov.half_trace_form(mform, chart, 1, t_trunc=10), t_trunc=10
    )
    extended = fedosov.extend_base(lifted, cotangent)
    before = fedosov.curvature(extended)
    conjugated = fedosov.psi_conjugate(extended, 3, 1, t_trunc=10)
    after = fedosov.curvature(conjugated)
    if before != after:
        failures.append({"case": "curvature", "before": repr(before), "after": repr(after)})
    if conjugated == extended:
        failures.append({"case": "conjugation-acts", "note": "psi left the connection fixed"})
    return _result(cid, name, failures, {"fiber_trunc": 3, "trunc_t": 10})


def check_rees_structure(seed: int, scale: str) -> CheckResult:
    cid, name = "C11", "rees-ring-structure-maps"
    rng = _rng(seed, cid)
    pairs = 100 if scale == "small" else 200
    failures = []
    for n in range(pairs):
        d = rng.choice((1, 2))
        a, b = random_rees(rng, d), random_rees(rng, d)
        ab = a * b
        if rees_sigma(ab) != rees_sigma(a) * rees_sigma(b):
            failures.append({"case": n, "identity": "sigma multiplicative"})
        if rees_iota(ab) != rees_iota(a) * rees_iota(b):
            failures.append({"case": n, "identity": "iota multiplicative"})
        for p, op in ab.comps.items():
            if op.order() > p:
                failures.append({"case": n, "identity": "order bound"})
        if rees_from_localized(rees_iota(a)) != a:
            failures.append({"case": n, "identity": "iota round trip"})
        if rees_iota(a).is_zero() and not a.is_zero():
            failures.append({"case": n, "identity": "iota injective"})
        shifted = rees_iota(a).shift(-2).shift(2)
        if shifted != rees_iota(a):
            failures.append({"case": n, "identity": "localization shift round trip"})
    return _result(cid, name, failures, {"pairs": pairs})


BATTERY = [
    check_moyal_associativity,
    check_bracket_normalization,
    check_hochschild_identities,
    check_trace_cycles,
    check_chain_map_compatibility,
    check_hkr_chain_map,
    check_rr_identity,
    check_gl_embedding,
    check_fedosov_curvature,
    check_psi_invariance,
    check_rees_structure,
]


def _run_battery(seed: int, scale: str) -> list[CheckResult]:
    return [fn(seed, scale) for fn in BATTERY]


def check_determinism_and_controls(seed: int, scale: str, first_pass: list | None = None) -> CheckResult:
    cid, name = "C12", "determinism-and-negative-controls"
    failures = []
    first = first_pass if first_pass is not None else _run_battery(seed, scale)
    second = _run_battery(seed, scale)
    bytes1 = Report("n/a", seed, scale, first).to_json_bytes()
    bytes2 = Report("n/a", seed, scale, second).to_json_bytes()
    if bytes1 != bytes2:
        failures.append({"case": "byte-reproducibility"})
    mutated = [
        check_moyal_associativity(seed, "small", mutate=True),
        check_bracket_normalization(seed, "small", mutate=True),
    ]
    if all(c.status == VERIFIED for c in mutated):
        failures.append(
            {"case": "kernel-sign-mutation", "note": "mutated product passed; checks are vacuous"}
        )
    return _result(cid, name, failures, {"mutation": "kernel sign flip"})


def run_suite(seed: int = 0, scale: str = "small") -> Report:
    """Run every criterion; deterministic for a fixed seed and scale."""
    if scale not in ("small", "full"):
        raise ValueError(f"unknown scale {scale!r}")
    checks = _run_battery(seed, scale)
    checks.append(check_determinism_and_controls(seed, scale, first_pass=checks))
    status = VERIFIED if all(c.status == VERIFIED for c in checks) else VIOLATED
    return Report(status=status, seed=seed, scale=scale, checks=checks)
