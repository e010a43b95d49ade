"""Elliptic curve records from the LMFDB, with a label-keyed JSON cache.

Lookups go cache directory, then shipped fixture records, then the remote
API.  Offline clients stop before the last step.  The cache directory is
taken from ``SSDEFECT_CACHE_DIR`` unless given explicitly.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable

from .arith import FactorizationIncomplete
from .curve import SingularCurveError, WeierstrassCurve, ap, conductor, local_data

__all__ = [
    "CurveRecord",
    "LocalRecord",
    "IwasawaRecord",
    "LmfdbError",
    "NotFound",
    "NetworkUnavailable",
    "MalformedResponse",
    "LmfdbClient",
    "fetch_by_label",
    "cross_check",
    "shipped_labels",
    "CACHE_ENV",
]

CACHE_ENV = "SSDEFECT_CACHE_DIR"
OFFLINE_ENV = "SSDEFECT_OFFLINE"
API_ROOT = "https://www.lmfdb.org/api"
CREMONA_LABEL = re.compile(r"^[1-9][0-9]*[a-z]+[1-9][0-9]*$")
LMFDB_LABEL = re.compile(r"^[1-9][0-9]*\.[a-z]+[1-9][0-9]*$")


class LmfdbError(Exception):
    pass


class NotFound(LmfdbError, LookupError):
    pass


class NetworkUnavailable(LmfdbError):
    pass


class MalformedResponse(LmfdbError):
    pass


@dataclass(frozen=True)
class LocalRecord:
    prime: int
    kodaira: str
    conductor_exponent: int
    tamagawa: int


@dataclass(frozen=True)
class IwasawaRecord:
    """Signed invariants at a supersingular p; None marks an unpublished value."""

    p: int
    lambda_plus: int | None = None
    lambda_minus: int | None = None
    mu_plus: int | None = None
    mu_minus: int | None = None


@dataclass(frozen=True)
class CurveRecord:
    label: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int
    local: tuple[LocalRecord, ...] | None = None
    torsion_structure: tuple[int, ...] | None = None
    iwasawa: tuple[IwasawaRecord, ...] = ()
    retrieved: str | None = None
    source: str = "fixture"  # remote | cache | fixture
    provenance: str | None = None

    def __post_init__(self):
        if len(self.ainvs) != 5:
            raise ValueError("a-invariants must have five entries")
        if self.source not in ("remote", "cache", "fixture"):
            raise ValueError(f"unknown record source {self.source!r}")
        WeierstrassCurve(*self.ainvs)  # raises on a singular model

    @property
    def curve(self) -> WeierstrassCurve:
        return WeierstrassCurve(*self.ainvs)

    def iwasawa_at(self, p: int) -> IwasawaRecord | None:
        for rec in self.iwasawa:
            if rec.p == p:
                return rec
        return None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ainvs"] = list(self.ainvs)
        d["local"] = None if self.local is None else [asdict(x) for x in self.local]
        d["torsion_structure"] = None if self.torsion_structure is None else list(self.torsion_structure)
        d["iwasawa"] = [asdict(x) for x in self.iwasawa]
        return d

    @classmethod
    def from_dict(cls, d: dict, source: str | None = None) -> "CurveRecord":
        try:
            local = d.get("local")
            tors = d.get("torsion_structure")
            return cls(
                label=str(d["label"]),
                ainvs=tuple(int(a) for a in d["ainvs"]),
                conductor=int(d["conductor"]),
                local=None if local is None else tuple(LocalRecord(**x) for x in local),
                torsion_structure=None if tors is None else tuple(int(x) for x in tors),
                iwasawa=tuple(IwasawaRecord(**x) for x in d.get("iwasawa") or ()),
                retrieved=d.get("retrieved"),
                source=source or d.get("source", "fixture"),
                provenance=d.get("provenance"),
            )
        except (KeyError, TypeError, ValueError, SingularCurveError) as e:
            raise MalformedResponse(f"bad curve record: {e}") from e


# -- shipped fixtures ----------------------------------------------------------


def _load_shipped() -> dict[str, dict]:
    text = resources.files("ssdefect").joinpath("data/curves.json").read_text()
    return {d["label"]: d for d in json.loads(text)["curves"]}


_SHIPPED: dict[str, dict] | None = None


def _shipped() -> dict[str, dict]:
    global _SHIPPED
    if _SHIPPED is None:
        _SHIPPED = _load_shipped()
    return _SHIPPED


def shipped_labels() -> list[str]:
    return sorted(_shipped())


# -- remote --------------------------------------------------------------------

_KODAIRA_ADDITIVE = {2: "II", 3: "III", 4: "IV", -1: "I0*", -2: "II*", -3: "III*", -4: "IV*"}


def decode_kodaira(code: int) -> str:
    """LMFDB integer encoding: 1 for I0, 4+n for I_n, -(4+n) for I_n^*."""
    if code in _KODAIRA_ADDITIVE:
        return _KODAIRA_ADDITIVE[code]
    if code == 1:
        return "I0"
    if code > 4:
        return f"I{code - 4}"
    if code < -4:
        return f"I{-code - 4}*"
    raise MalformedResponse(f"unknown Kodaira code {code}")


def _urlopen_json(url: str, timeout: float) -> object:
    req = urllib.request.Request(url, headers={"Accept": "application/json", "User-Agent": "ssdefect/0.1"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return json.loads(resp.read().decode("utf-8"))


class LmfdbClient:
    """Thread-safe client.  Remote requests are serialized and spaced by
    ``min_interval`` seconds; cache reads need no lock."""

    def __init__(
        self,
        cache_dir: str | os.PathLike | None = None,
        offline: bool | None = None,
        *,
        api_root: str = API_ROOT,
        min_interval: float = 1.0,
        timeout: float = 20.0,
        use_fixtures: bool = True,
        opener: Callable[[str, float], object] | None = None,
    ):
        if cache_dir is None:
            cache_dir = os.environ.get(CACHE_ENV)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if offline is None:
            offline = os.environ.get(OFFLINE_ENV, "") not in ("", "0")
        self.offline = offline
        self.api_root = api_root.rstrip("/")
        self.min_interval = min_interval
        self.timeout = timeout
        self.use_fixtures = use_fixtures
        self._open = opener or _urlopen_json
        self._net_lock = threading.Lock()
        self._write_lock = threading.Lock()
        self._last_request = 0.0

    # cache

    def _cache_path(self, label: str) -> Path | None:
        return None if self.cache_dir is None else self.cache_dir / f"{label}.json"

    def _read_cache(self, label: str) -> CurveRecord | None:
        path = self._cache_path(label)
        if path is None or not path.is_file():
            return None
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise MalformedResponse(f"corrupt cache entry {path}: {e}") from e
        return CurveRecord.from_dict(data, source="cache")

    def store(self, record: CurveRecord) -> None:
        path = self._cache_path(record.label)
        if path is None:
            return
        with self._write_lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(record.to_dict(), indent=1, sort_keys=True))
            tmp.replace(path)

    # remote

    def _get(self, table: str, **params) -> list[dict]:
        if self.offline:
            raise NetworkUnavailable("offline mode: no network access")
        query = urllib.parse.urlencode({**params, "_format": "json"})
        url = f"{self.api_root}/{table}/?{query}"
        with self._net_lock:
            wait = self._last_request + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            try:
                payload = self._open(url, self.timeout)
            except (urllib.error.URLError, OSError, TimeoutError) as e:
                raise NetworkUnavailable(f"GET {url} failed: {e}") from e
            except json.JSONDecodeError as e:
                raise MalformedResponse(f"GET {url}: not JSON") from e
            finally:
                self._last_request = time.monotonic()
        if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
            raise MalformedResponse(f"GET {url}: no data list in response")
        return payload["data"]

    def _fetch_remote(self, label: str) -> CurveRecord:
        key = "lmfdb_label" if LMFDB_LABEL.match(label) else "Clabel"
        rows = self._get("ec_curvedata", **{key: label})
        if not rows:
            raise NotFound(f"no curve with label {label}")
        row = rows[0]
        try:
            lmfdb_label = row["lmfdb_label"]
            ainvs = [int(a) for a in row["ainvs"]]
            cond = int(row["conductor"])
            tors = row.get("torsion_structure")
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedResponse(f"curve data for {label}: {e}") from e
        local = []
        for r in self._get("ec_localdata", lmfdb_label=lmfdb_label):
            try:
                local.append(
                    LocalRecord(
                        int(r["prime"]),
                        decode_kodaira(int(r["kodaira_symbol"])),
                        int(r["conductor_valuation"]),
                        int(r["tamagawa_number"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as e:
                raise MalformedResponse(f"local data for {label}: {e}") from e
        iw = []
        for r in self._get("ec_iwasawa", lmfdb_label=lmfdb_label):
            # supersingular entries are stored as [lambda+, lambda-, mu+, mu-]
            for p, vals in (r.get("iwdata") or {}).items():
                if isinstance(vals, list) and len(vals) == 4:
                    lp, lm, mp, mm = vals
                    iw.append(IwasawaRecord(int(p), lp, lm, mp, mm))
        return CurveRecord(
            label=label,
            ainvs=tuple(ainvs),
            conductor=cond,
            local=tuple(sorted(local, key=lambda x: x.prime)),
            torsion_structure=None if tors is None else tuple(int(t) for t in tors),
            iwasawa=tuple(sorted(iw, key=lambda x: x.p)),
            retrieved=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            source="remote",
        )

    # public

    def fetch_by_label(self, label: str) -> CurveRecord:
        label = label.strip()
        if not (CREMONA_LABEL.match(label) or LMFDB_LABEL.match(label)):
            raise NotFound(f"{label!r} is not an elliptic curve label")
        rec = self._read_cache(label)
        if rec is not None:
            return rec
        if self.use_fixtures and label in _shipped():
            return CurveRecord.from_dict(_shipped()[label], source="fixture")
        if self.offline:
            raise NetworkUnavailable(f"offline mode and {label} is neither cached nor shipped")
        rec = self._fetch_remote(label)
        self.store(rec)
        return rec


def fetch_by_label(label: str, *, offline: bool | None = None, cache_dir=None) -> CurveRecord:
    return LmfdbClient(cache_dir=cache_dir, offline=offline).fetch_by_label(label)


# -- cross-check against local recomputation ------------------------------------


@dataclass(frozen=True)
class Mismatch:
    field: str
    recorded: object
    computed: object

    def __str__(self):
        return f"{self.field}: recorded {self.recorded}, computed {self.computed}"


def cross_check(record: CurveRecord, primes_for_ap: tuple[int, ...] = (3, 5, 7)) -> list[Mismatch]:
    """Recompute conductor and local data; a_p is checked for sanity only."""
    out: list[Mismatch] = []
    E = record.curve
    try:
        N = conductor(E).value()
    except FactorizationIncomplete as e:
        return [Mismatch("conductor", record.conductor, f"unfactored ({e})")]
    if N != record.conductor:
        out.append(Mismatch("conductor", record.conductor, N))
    computed = {d.prime: d for d in local_data(E)}
    if record.local is not None:
        recorded = {x.prime: x for x in record.local}
        if set(recorded) != set(computed):
            out.append(Mismatch("bad_primes", sorted(recorded), sorted(computed)))
        for q in sorted(set(recorded) & set(computed)):
            r, c = recorded[q], computed[q]
            if r.kodaira != c.kodaira:
                out.append(Mismatch(f"local[{q}].kodaira", r.kodaira, c.kodaira))
            if r.conductor_exponent != c.conductor_exponent:
                out.append(Mismatch(f"local[{q}].conductor_exponent", r.conductor_exponent, c.conductor_exponent))
            if r.tamagawa != c.tamagawa:
                out.append(Mismatch(f"local[{q}].tamagawa", r.tamagawa, c.tamagawa))
    for p in primes_for_ap:
        if p in computed:
            continue
        a = ap(E, p)
        if a * a > 4 * p:
            out.append(Mismatch(f"a_{p}", "|a_p| <= 2 sqrt(p)", a))
    return out


def with_source(record: CurveRecord, source: str) -> CurveRecord:
    return replace(record, source=source)
