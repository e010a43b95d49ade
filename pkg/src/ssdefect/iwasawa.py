"""Defects, rho calibration and lambda prediction along a family of curves
sharing a supersingular mod-p representation.

For such a family with vanishing mu, lambda = rho + delta where rho depends
only on the residual representation and delta is the local defect

    delta(E) = sum over bad l of s(l) * dim_{F_p} E(L_w)[p],

L_w being the first layer of the local cyclotomic tower at l.  rho is not
computed: it is read off a reference member whose lambda is published.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .curve import WeierstrassCurve, bad_primes, check_hyp1, count_points_mod_p, minimal_model, HypOneVerdict
from .cyclotomic import splitting_number
from .families import family_member
from .torsion import torsion_dim_base, torsion_dim_first_layer

__all__ = [
    "HypothesisFailure",
    "NegativeRhoError",
    "FixtureError",
    "DefectEntry",
    "DefectReport",
    "RhoCalibration",
    "Discrepancy",
    "LambdaReport",
    "CongruenceVerdict",
    "FamilyMember",
    "FamilyFixture",
    "MemberOutcome",
    "FamilyRun",
    "defect",
    "calibrate_rho",
    "predict_lambda",
    "congruence_check",
    "run_family",
    "shipped_fixture",
    "SHIPPED_FIXTURES",
]

SIGNS = ("+", "-")
SHIPPED_FIXTURES = ("p3_D1", "p3_Dm1", "p5_D3", "p5_D14")


class HypothesisFailure(ValueError):
    def __init__(self, verdict: HypOneVerdict):
        super().__init__("; ".join(verdict.reasons) or "hypothesis check failed")
        self.verdict = verdict


class NegativeRhoError(ValueError):
    pass


class FixtureError(ValueError):
    pass


# -- defect ----------------------------------------------------------------------


@dataclass(frozen=True)
class DefectEntry:
    ell: int
    s: int
    layer: str
    dim: int
    base_dim: int

    @property
    def contribution(self) -> int:
        return self.s * self.dim

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "s": self.s,
            "layer": self.layer,
            "dim": self.dim,
            "base_dim": self.base_dim,
            "contribution": self.contribution,
        }


@dataclass(frozen=True)
class DefectReport:
    curve: WeierstrassCurve
    p: int
    entries: tuple[DefectEntry, ...]
    # primes of ordinary reduction above p in the base field: none over Q,
    # since the curve is supersingular at p
    ordinary_entries: tuple[DefectEntry, ...] = ()
    hyp1: HypOneVerdict | None = None

    def __post_init__(self):
        total_s = sum(e.s for e in self.entries) + sum(e.s for e in self.ordinary_entries)
        if not 0 <= self.delta <= 2 * total_s:
            raise AssertionError(f"defect {self.delta} outside [0, {2 * total_s}]")

    @property
    def delta(self) -> int:
        return sum(e.contribution for e in self.entries) + sum(e.contribution for e in self.ordinary_entries)

    def entry(self, ell: int) -> DefectEntry:
        for e in self.entries:
            if e.ell == ell:
                return e
        raise KeyError(ell)

    def to_dict(self) -> dict:
        return {
            "curve": self.curve.to_list(),
            "p": self.p,
            "entries": [e.to_dict() for e in self.entries],
            "ordinary_entries": [e.to_dict() for e in self.ordinary_entries],
            "delta": self.delta,
        }


def defect(curve: WeierstrassCurve, p: int) -> DefectReport:
    verdict = check_hyp1(curve, p)
    if not verdict.passed:
        raise HypothesisFailure(verdict)
    model, _ = minimal_model(curve)
    entries = []
    for ell in bad_primes(model):
        if ell == p:  # pragma: no cover - p is a prime of good reduction here
            continue
        base = torsion_dim_base(model, p, ell)
        first = torsion_dim_first_layer(model, p, ell, base)
        entries.append(DefectEntry(ell, splitting_number(ell, p).s, first.layer, first.dim, base.dim))
    return DefectReport(model, p, tuple(entries), (), verdict)


# -- calibration and prediction ------------------------------------------------------


@dataclass(frozen=True)
class RhoCalibration:
    p: int
    sign: str
    reference: str
    reference_lambda: int
    reference_delta: int

    @property
    def rho(self) -> int:
        return self.reference_lambda - self.reference_delta

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "sign": self.sign,
            "reference": self.reference,
            "reference_lambda": self.reference_lambda,
            "reference_delta": self.reference_delta,
            "rho": self.rho,
        }


def calibrate_rho(
    report: DefectReport,
    lambda_plus: int,
    lambda_minus: int,
    *,
    mu_plus: int | None = 0,
    mu_minus: int | None = 0,
    reference: str = "",
) -> tuple[RhoCalibration, RhoCalibration]:
    """rho = lambda - delta for each sign of the reference curve."""
    if mu_plus != 0 or mu_minus != 0:
        raise ValueError("reference curve must have published mu+ = mu- = 0")
    reference = reference or str(report.curve)
    out = []
    for sign, lam in zip(SIGNS, (lambda_plus, lambda_minus)):
        cal = RhoCalibration(report.p, sign, reference, int(lam), report.delta)
        if cal.rho < 0:
            raise NegativeRhoError(f"rho{sign} = {lam} - {report.delta} < 0: inconsistent reference data")
        out.append(cal)
    return out[0], out[1]


@dataclass(frozen=True)
class Discrepancy:
    kind: str
    key: str
    computed: object
    recorded: object
    note: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "key": self.key, "computed": self.computed, "recorded": self.recorded, "note": self.note}

    def __str__(self):
        s = f"{self.kind}[{self.key}]: computed {self.computed}, recorded {self.recorded}"
        return f"{s} ({self.note})" if self.note else s


@dataclass(frozen=True)
class LambdaReport:
    curve: WeierstrassCurve
    p: int
    defect: DefectReport
    rho: dict  # sign -> int
    mu_status: str  # zero-by-propagation | zero-by-reference | unknown
    flags: tuple[Discrepancy, ...] = ()

    def __post_init__(self):
        if self.mu_status not in ("zero-by-propagation", "zero-by-reference", "unknown"):
            raise ValueError(f"bad mu status {self.mu_status}")

    @property
    def delta(self) -> int:
        return self.defect.delta

    def lam(self, sign: str) -> int:
        return self.rho[sign] + self.delta

    @property
    def lambda_plus(self) -> int:
        return self.lam("+")

    @property
    def lambda_minus(self) -> int:
        return self.lam("-")

    @property
    def lambda_difference(self) -> int:
        return self.lambda_plus - self.lambda_minus

    def with_flags(self, flags) -> "LambdaReport":
        return LambdaReport(self.curve, self.p, self.defect, self.rho, self.mu_status, tuple(self.flags) + tuple(flags))

    def to_dict(self) -> dict:
        return {
            "curve": self.curve.to_list(),
            "p": self.p,
            "signs": {s: {"rho": self.rho[s], "delta": self.delta, "lambda": self.lam(s)} for s in SIGNS},
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
            "lambda_difference": self.lambda_difference,
            "mu_status": self.mu_status,
            "defect": self.defect.to_dict(),
            "hyp1": None if self.defect.hyp1 is None else self.defect.hyp1.to_dict(),
            "flags": [f.to_dict() for f in self.flags],
        }


def predict_lambda(
    curve: WeierstrassCurve,
    p: int,
    calibration: tuple[RhoCalibration, RhoCalibration],
    *,
    report: DefectReport | None = None,
    mu_status: str = "zero-by-propagation",
) -> LambdaReport:
    """lambda = rho + delta for a curve congruent mod p to the calibration reference."""
    rho = {}
    for cal in calibration:
        if cal.p != p:
            raise ValueError(f"calibration is for p={cal.p}, not {p}")
        rho[cal.sign] = cal.rho
    if set(rho) != set(SIGNS):
        raise ValueError("need one calibration per sign")
    report = report or defect(curve, p)
    return LambdaReport(report.curve, p, report, rho, mu_status)


# -- residual congruence screen ------------------------------------------------------


@dataclass(frozen=True)
class CongruenceVerdict:
    congruent: bool
    p: int
    bound: int
    witness: int | None
    evidence: tuple[tuple[int, int, int], ...]  # (l, a_l(E1), a_l(E2))

    def to_dict(self) -> dict:
        return {
            "congruent": self.congruent,
            "p": self.p,
            "bound": self.bound,
            "witness": self.witness,
            "evidence": [list(e) for e in self.evidence],
        }


def congruence_check(E1: WeierstrassCurve, E2: WeierstrassCurve, p: int, bound: int = 100) -> CongruenceVerdict:
    """a_l(E1) = a_l(E2) mod p for every prime l <= bound not dividing p N1 N2.

    A necessary condition for E1[p] and E2[p] to be isomorphic; stops at the
    first violation.
    """
    if bound > 10**4:
        raise ValueError("bound is limited to 10^4 (naive point counting)")
    from .arith import small_primes

    M1, _ = minimal_model(E1)
    M2, _ = minimal_model(E2)
    evidence = []
    for ell in small_primes(bound):
        if ell == p or M1.discriminant % ell == 0 or M2.discriminant % ell == 0:
            continue
        a1 = ell + 1 - count_points_mod_p(M1, ell)
        a2 = ell + 1 - count_points_mod_p(M2, ell)
        evidence.append((ell, a1, a2))
        if (a1 - a2) % p:
            return CongruenceVerdict(False, p, bound, ell, tuple(evidence))
    return CongruenceVerdict(True, p, bound, None, tuple(evidence))


# -- family fixtures -----------------------------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    t: int
    label: str | None = None
    ainvs: tuple[int, ...] | None = None
    published: dict | None = None  # mu_plus, mu_minus, lambda_plus, lambda_minus
    recorded: dict | None = None  # values from printed tables, compared as annotations

    def to_dict(self) -> dict:
        d = {"t": self.t}
        if self.label is not None:
            d["label"] = self.label
        if self.ainvs is not None:
            d["ainvs"] = list(self.ainvs)
        if self.published is not None:
            d["published"] = dict(self.published)
        if self.recorded is not None:
            d["recorded"] = dict(self.recorded)
        return d


_PUBLISHED_KEYS = ("mu_plus", "mu_minus", "lambda_plus", "lambda_minus")


@dataclass(frozen=True)
class FamilyFixture:
    p: int
    name: str
    reference: int  # parameter t of the reference member
    members: tuple[FamilyMember, ...]
    D: int | None = None  # enables generating members from t
    congruence_bound: int = 100

    def __post_init__(self):
        ts = [m.t for m in self.members]
        if len(set(ts)) != len(ts):
            raise FixtureError("duplicate member parameters")
        ref = self.reference_member
        pub = ref.published or {}
        if any(pub.get(k) is None for k in _PUBLISHED_KEYS):
            raise FixtureError("reference member needs published mu and lambda for both signs")
        if pub["mu_plus"] != 0 or pub["mu_minus"] != 0:
            raise FixtureError("reference member must have mu+ = mu- = 0")
        for m in self.members:
            if m.ainvs is None and m.label is None and self.D is None:
                raise FixtureError(f"member t={m.t} has no equation, label or generator")
            if m.ainvs is not None and len(m.ainvs) not in (2, 5):
                raise FixtureError(f"member t={m.t}: a-invariants must have 2 or 5 entries")

    @property
    def reference_member(self) -> FamilyMember:
        for m in self.members:
            if m.t == self.reference:
                return m
        raise FixtureError(f"reference t={self.reference} is not a member")

    @classmethod
    def from_dict(cls, d: dict) -> "FamilyFixture":
        try:
            members = tuple(
                FamilyMember(
                    t=int(m["t"]),
                    label=m.get("label"),
                    ainvs=None if m.get("ainvs") is None else tuple(int(a) for a in m["ainvs"]),
                    published=m.get("published"),
                    recorded=m.get("recorded"),
                )
                for m in d["members"]
            )
            return cls(
                p=int(d["p"]),
                name=str(d["name"]),
                reference=int(d["reference"]),
                members=members,
                D=None if d.get("D") is None else int(d["D"]),
                congruence_bound=int(d.get("congruence_bound", 100)),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, FixtureError):
                raise
            raise FixtureError(f"malformed family fixture: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> "FamilyFixture":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise FixtureError(f"{path}: not JSON ({e})") from e
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = {"p": self.p, "name": self.name, "reference": self.reference, "members": [m.to_dict() for m in self.members]}
        if self.D is not None:
            d["D"] = self.D
        d["congruence_bound"] = self.congruence_bound
        return d


def shipped_fixture(name: str) -> FamilyFixture:
    if name not in SHIPPED_FIXTURES:
        raise KeyError(f"unknown shipped fixture {name}; choose from {', '.join(SHIPPED_FIXTURES)}")
    text = resources.files("ssdefect").joinpath(f"data/families/{name}.json").read_text()
    return FamilyFixture.from_dict(json.loads(text))


# -- family pipeline ----------------------------------------------------------------


@dataclass
class MemberOutcome:
    t: int
    label: str | None
    curve: WeierstrassCurve | None
    status: str  # reference | computed | discarded | error
    hyp1: HypOneVerdict | None = None
    report: LambdaReport | None = None
    congruence: CongruenceVerdict | None = None
    comparisons: list = field(default_factory=list)  # (field, computed, expected, source, status)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "label": self.label,
            "curve": None if self.curve is None else self.curve.to_list(),
            "status": self.status,
            "hyp1": None if self.hyp1 is None else self.hyp1.to_dict(),
            "report": None if self.report is None else self.report.to_dict(),
            "congruence": None if self.congruence is None else self.congruence.to_dict(),
            "comparisons": [
                {"field": f, "computed": c, "expected": e, "source": s, "status": st}
                for f, c, e, s, st in self.comparisons
            ],
            "error": self.error,
        }


@dataclass
class FamilyRun:
    fixture: FamilyFixture
    calibration: tuple[RhoCalibration, RhoCalibration] | None
    members: list[MemberOutcome]
    lambda_difference_constant: bool
    warnings: list[str]

    @property
    def reports(self) -> list[LambdaReport]:
        return [m.report for m in self.members if m.report is not None]

    @property
    def ok(self) -> bool:
        return all(m.status != "error" for m in self.members)

    def member(self, t: int) -> MemberOutcome:
        for m in self.members:
            if m.t == t:
                return m
        raise KeyError(t)

    def to_dict(self) -> dict:
        return {
            "family": self.fixture.name,
            "p": self.fixture.p,
            "reference": self.fixture.reference,
            "calibration": None if self.calibration is None else [c.to_dict() for c in self.calibration],
            "members": [m.to_dict() for m in self.members],
            "checks": {"lambda_difference_constant": self.lambda_difference_constant},
            "warnings": list(self.warnings),
        }


def _resolve(fixture: FamilyFixture, m: FamilyMember, client) -> tuple[WeierstrassCurve, list[str]]:
    notes = []
    if m.ainvs is not None:
        E = WeierstrassCurve.from_ainvs(m.ainvs)
    elif m.label is not None:
        if client is None:
            from .lmfdb import LmfdbClient

            client = LmfdbClient()
        E = client.fetch_by_label(m.label).curve
    else:
        return family_member(fixture.p, fixture.D, m.t), notes
    if fixture.D is not None:
        G = family_member(fixture.p, fixture.D, m.t)
        if minimal_model(E)[0].ainvs != G.ainvs:
            notes.append(f"t={m.t}: supplied equation differs from the generated member {G}")
    return E, notes


def _member_defect(args):
    ainvs, p = args
    E = WeierstrassCurve(*ainvs)
    verdict = check_hyp1(E, p)
    if not verdict.passed:
        return verdict, None, None
    try:
        return verdict, defect(E, p), None
    except Exception as e:  # reported per member, not fatal to the run
        return verdict, None, f"{type(e).__name__}: {e}"


def _compare(outcome: MemberOutcome, report: LambdaReport, member: FamilyMember, p: int) -> list[Discrepancy]:
    flags = []
    if member.published:
        for key in ("lambda_plus", "lambda_minus"):
            pub = member.published.get(key)
            if pub is None:
                continue
            got = getattr(report, key)
            outcome.comparisons.append((key, got, pub, "published", "match" if got == pub else "discrepancy"))
            if got != pub:
                flags.append(Discrepancy(key, key, got, pub, "published value"))
    rec = member.recorded or {}
    dims = {e.ell: e for e in report.defect.entries}
    if "conductor" in rec:
        from .curve import conductor

        N = conductor(report.curve).value()
        outcome.comparisons.append(("conductor", N, rec["conductor"], "recorded", "match" if N == rec["conductor"] else "discrepancy"))
        if N != rec["conductor"]:
            flags.append(Discrepancy("conductor", "N", N, rec["conductor"]))
    if "bad_primes" in rec:
        got = sorted(dims)
        want = sorted(int(x) for x in rec["bad_primes"])
        outcome.comparisons.append(("bad_primes", got, want, "recorded", "match" if got == want else "discrepancy"))
        if got != want:
            flags.append(Discrepancy("bad_primes", "bad_primes", got, want))
    for key, attr in (("dims", "base_dim"), ("splitting", "s")):
        for ell_s, want in (rec.get(key) or {}).items():
            ell = int(ell_s)
            got = getattr(dims[ell], attr) if ell in dims else None
            outcome.comparisons.append((f"{key}[{ell}]", got, want, "recorded", "match" if got == want else "discrepancy"))
            if got != want:
                flags.append(Discrepancy("splitting_number" if key == "splitting" else "torsion_dim", str(ell), got, want, "computed value drives lambda"))
    for key in ("delta", "lambda_plus", "lambda_minus"):
        if key in rec:
            got = report.delta if key == "delta" else getattr(report, key)
            outcome.comparisons.append((key, got, rec[key], "recorded", "match" if got == rec[key] else "discrepancy"))
            if got != rec[key]:
                flags.append(Discrepancy(key, key, got, rec[key], "computed value drives lambda"))
    if "a_p" in rec and outcome.hyp1 is not None:
        got = outcome.hyp1.ap
        outcome.comparisons.append((f"a_{p}", got, rec["a_p"], "recorded", "match" if got == rec["a_p"] else "discrepancy"))
        if got != rec["a_p"]:
            flags.append(Discrepancy("a_p", str(p), got, rec["a_p"]))
    return flags


def run_family(fixture: FamilyFixture, *, client=None, parallel: int = 1) -> FamilyRun:
    """Evaluate every member; results come back in fixture order whatever
    the degree of parallelism."""
    p = fixture.p
    warnings: list[str] = []
    outcomes: list[MemberOutcome] = []
    curves: list[WeierstrassCurve | None] = []
    for m in fixture.members:
        try:
            E, notes = _resolve(fixture, m, client)
            warnings.extend(notes)
            curves.append(minimal_model(E)[0])
            outcomes.append(MemberOutcome(m.t, m.label, curves[-1], "computed"))
        except Exception as e:
            curves.append(None)
            outcomes.append(MemberOutcome(m.t, m.label, None, "error", error=f"{type(e).__name__}: {e}"))

    jobs = [(c.ainvs, p) for c in curves if c is not None]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_member_defect, jobs))
    else:
        results = [_member_defect(j) for j in jobs]
    it = iter(results)
    defects: dict[int, DefectReport] = {}
    for m, out in zip(fixture.members, outcomes):
        if out.curve is None:
            continue
        verdict, rep, err = next(it)
        out.hyp1 = verdict
        if not verdict.passed:
            out.status = "discarded"
            want = (m.recorded or {}).get("a_p")
            if want is not None:
                out.comparisons.append((f"a_{p}", verdict.ap, want, "recorded", "match" if verdict.ap == want else "discrepancy"))
        elif err is not None:
            out.status, out.error = "error", err
        else:
            defects[m.t] = rep

    ref = fixture.reference_member
    ref_out = outcomes[fixture.members.index(ref)]
    calibration = None
    if fixture.reference not in defects:
        ref_out.status = "error"
        ref_out.error = ref_out.error or "reference member failed the hypothesis check"
    else:
        pub = ref.published
        calibration = calibrate_rho(
            defects[fixture.reference],
            pub["lambda_plus"],
            pub["lambda_minus"],
            mu_plus=pub["mu_plus"],
            mu_minus=pub["mu_minus"],
            reference=ref.label or f"t={ref.t}",
        )

    for m, out in zip(fixture.members, outcomes):
        if m.t not in defects or calibration is None:
            continue
        is_ref = m.t == fixture.reference
        rep = predict_lambda(
            out.curve, p, calibration, report=defects[m.t], mu_status="zero-by-reference" if is_ref else "zero-by-propagation"
        )
        if is_ref:
            out.status = "reference"
        else:
            out.congruence = congruence_check(curves[fixture.members.index(ref)], out.curve, p, fixture.congruence_bound)
            if not out.congruence.congruent:
                warnings.append(f"t={m.t}: a_l mismatch mod {p} at l={out.congruence.witness}; not congruent to the reference")
        flags = _compare(out, rep, m, p)
        out.report = rep.with_flags(flags)
        for f in flags:
            warnings.append(f"t={m.t}: {f}")

    diffs = {r.lambda_difference for r in (o.report for o in outcomes) if r is not None}
    constant = len(diffs) <= 1
    if not constant:
        warnings.append(f"lambda+ - lambda- not constant across the family: {sorted(diffs)}")
    return FamilyRun(fixture, calibration, outcomes, constant, warnings)
