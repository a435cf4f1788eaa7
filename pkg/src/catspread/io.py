"""File formats, the measure-spec grammar and number formatting."""

from __future__ import annotations

import csv
import io
import json
import math

from .errors import CatSpreadError
from .estimation import Sample
from . import measures as M


class ParseError(CatSpreadError):
    """Input file or spec string could not be parsed."""


# ---------------------------------------------------------------------------
# Numbers
# ---------------------------------------------------------------------------

def format_number(x: float) -> str:
    """
    Render a value with 12 digits after the point.

    Magnitudes below 0.1 switch to scientific notation with 12 significant
    digits so small values keep their precision. Always uses ``.`` as the
    decimal separator.
    """
    x = float(x)
    if x == 0 or not math.isfinite(x) or abs(x) >= 0.1:
        if x == 0:
            x = 0.0
        return "%.12f" % x
    return "%.11e" % x


def json_number(x: float) -> float:
    return float(format_number(x))


# ---------------------------------------------------------------------------
# Pmf and sample files
# ---------------------------------------------------------------------------

def parse_pmf_text(text: str, renormalize: bool = False) -> M.Pmf:
    """
    Parse a pmf from JSON (``{"probs": [...], "labels": [...]}``) or from a
    two-column ``label,probability`` CSV with a header row.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("invalid JSON: %s" % exc) from None
        if not isinstance(doc, dict) or "probs" not in doc:
            raise ParseError('JSON pmf needs a "probs" array')
        probs = doc["probs"]
        labels = doc.get("labels")
        if not isinstance(probs, list) or not all(
                isinstance(p, (int, float)) and not isinstance(p, bool) for p in probs):
            raise ParseError('"probs" must be an array of numbers')
        if labels is not None and not isinstance(labels, list):
            raise ParseError('"labels" must be an array of strings')
    else:
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if len(rows) < 2:
            raise ParseError("CSV pmf needs a header and at least one row")
        labels, probs = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if len(row) != 2:
                raise ParseError("CSV row %d: expected label,probability" % lineno)
            labels.append(row[0].strip())
            try:
                probs.append(float(row[1]))
            except ValueError:
                raise ParseError("CSV row %d: bad probability %r"
                                 % (lineno, row[1])) from None
    return M.Pmf.from_values(probs, labels, renormalize=renormalize)


def read_pmf(path, renormalize=False) -> M.Pmf:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc.strerror)) from None
    return parse_pmf_text(text, renormalize)


def parse_sample_text(text: str) -> Sample:
    """One label per line; blank lines and ``#`` comments are ignored."""
    obs = []
    for line in text.splitlines():
        label = line.strip()
        if not label or label.startswith("#"):
            continue
        obs.append(label)
    if not obs:
        raise ParseError("sample file has no observations")
    return Sample(tuple(obs))


def read_sample(path) -> Sample:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc.strerror)) from None
    return parse_sample_text(text)


# ---------------------------------------------------------------------------
# Measure specs
# ---------------------------------------------------------------------------

def _float(s, what):
    s = s.strip().lower()
    if s in ("inf", "infinity"):
        return math.inf
    try:
        return float(s)
    except ValueError:
        raise ParseError("bad number for %s: %r" % (what, s)) from None


def _params(body, allowed):
    out = {}
    if not body:
        return out
    for item in body.split(","):
        if "=" not in item:
            raise ParseError("expected key=value, got %r" % item)
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in allowed:
            raise ParseError("unknown parameter %r (allowed: %s)"
                             % (k, ", ".join(allowed)))
        out[k] = v.strip()
    return out


def parse_weight(token: str):
    """
    Weight tokens: ``exp``, ``sin``, ``neglog``, ``pow<q>`` (e.g. ``pow2``)
    and ``tsallis<m>`` with optional ``@0`` to start the sum at q = 0.
    """
    t = token.strip().lower()
    if t == "exp":
        return M.Exp()
    if t == "sin":
        return M.Sin()
    if t == "neglog":
        return M.NegLogComplement()
    if t.startswith("pow"):
        return M.Power(_float(t[3:], "pow"))
    if t.startswith("tsallis"):
        rest, start = t[7:], 1
        if rest.endswith("@0"):
            rest, start = rest[:-2], 0
        try:
            m = int(rest)
        except ValueError:
            raise ParseError("tsallis weight needs an integer order") from None
        return M.TsallisSum(m, start)
    raise ParseError("unknown weight %r" % token)


def parse_measure(spec: str):
    """
    Parse a measure spec string.

    Grammar: ``dvar[:alpha=A | sigma2=S | c1=C1,c2=C2]``, ``gini``,
    ``shannon``, ``extropy``, ``tsallis:m=M``, ``geom:w=W,l=L,p=P``,
    ``alg:p=P``; ``P`` may be ``inf``.
    """
    name, _, body = spec.strip().partition(":")
    name = name.strip().lower()
    try:
        if name == "dvar":
            kv = _params(body, ("alpha", "sigma2", "c1", "c2"))
            if not kv:
                return M.DistanceVariance()
            if set(kv) == {"alpha"}:
                return M.DistanceVariance(M.AlphaPower(_float(kv["alpha"], "alpha")))
            if set(kv) == {"sigma2"}:
                return M.DistanceVariance(M.GaussianKernel(_float(kv["sigma2"], "sigma2")))
            if set(kv) == {"c1", "c2"}:
                return M.DistanceVariance(M.TwoConstant(_float(kv["c1"], "c1"),
                                                        _float(kv["c2"], "c2")))
            raise ParseError("dvar takes alpha=, sigma2= or c1=,c2=")
        if name in ("gini", "shannon", "extropy"):
            if body:
                raise ParseError("%s takes no parameters" % name)
            return {"gini": M.Gini, "shannon": M.Shannon, "extropy": M.Extropy}[name]()
        if name == "tsallis":
            kv = _params(body, ("m",))
            if "m" not in kv:
                raise ParseError("tsallis needs m=")
            return M.Tsallis(_float(kv["m"], "m"))
        if name == "geom":
            kv = _params(body, ("w", "l", "p"))
            if "w" not in kv:
                raise ParseError("geom needs w=")
            return M.Geometric(parse_weight(kv["w"]), _float(kv.get("l", "1"), "l"),
                               _float(kv.get("p", "1"), "p"))
        if name == "alg":
            kv = _params(body, ("p",))
            return M.Algebraic(_float(kv.get("p", "2"), "p"))
    except ParseError:
        raise
    except CatSpreadError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError("unknown measure %r" % name)
