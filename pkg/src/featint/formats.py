"""Readers and writers for the on-disk formats."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import pc as pcs
from .callgraph import OverlayEntry
from .cparse import SourceUnit
from .errors import FeatintError, ParseError
from .features import Configuration, FeatureModel
from .learner import InfluenceModel, MeasurementSet
from .synth import CallPlanEntry, SyntheticSpec

PERF_COLUMN = "performance_s"


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", str(path), e.lineno) from None


def _expr(text, where):
    try:
        return pcs.parse(text)
    except FeatintError as e:
        raise FeatintError(f"{where}: {e}") from None


# ---------------------------------------------------------------- feature model

def feature_model_from_dict(d) -> FeatureModel:
    if not isinstance(d, dict) or not isinstance(d.get("features"), list):
        raise FeatintError("feature model must be an object with a 'features' list")
    constraints = [_expr(c, "constraint") for c in d.get("constraints", [])]
    return FeatureModel(tuple(d["features"]), tuple(constraints))


def feature_model_to_dict(fm: FeatureModel) -> dict:
    return {"features": list(fm.features), "constraints": [str(c) for c in fm.constraints]}


def load_feature_model(path) -> FeatureModel:
    try:
        return feature_model_from_dict(_load_json(path))
    except ParseError:
        raise
    except FeatintError as e:
        raise ParseError(str(e), str(path)) from None


# ---------------------------------------------------------------- corpus

def load_corpus(directory) -> list:
    """All ``*.c`` files below ``directory``, sorted, with paths relative to it."""
    root = Path(directory)
    if not root.is_dir():
        raise FeatintError(f"corpus directory {directory} does not exist")
    return [
        SourceUnit(p.relative_to(root).as_posix(), p.read_text())
        for p in sorted(root.rglob("*.c"))
    ]


def write_corpus(units, directory):
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for u in units:
        target = root / u.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(u.text)


def load_allow_list(path) -> frozenset:
    data = _load_json(path)
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ParseError("allow-list must be a JSON array of macro names", str(path))
    return frozenset(data)


# ---------------------------------------------------------------- overlay

def overlay_from_list(data) -> list:
    if not isinstance(data, list):
        raise FeatintError("overlay must be a JSON array")
    out = []
    for k, item in enumerate(data):
        try:
            out.append(OverlayEntry(item["caller"], item["callee"],
                                    _expr(item["pc"], f"overlay entry {k}"),
                                    item.get("occurrences", 1)))
        except (KeyError, TypeError):
            raise FeatintError(f"overlay entry {k} needs caller, callee and pc") from None
    return out


def overlay_to_list(entries) -> list:
    return [{"caller": e.caller, "callee": e.callee, "pc": str(e.pc), "occurrences": e.occurrences}
            for e in entries]


def load_overlay(path) -> list:
    try:
        return overlay_from_list(_load_json(path))
    except ParseError:
        raise
    except FeatintError as e:
        raise ParseError(str(e), str(path)) from None


# ---------------------------------------------------------------- measurements

def read_measurements(path, fm: FeatureModel) -> MeasurementSet:
    path = str(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty measurements file", path, 1)
        header = [h.strip() for h in header]
        if not header or header[-1] != PERF_COLUMN:
            raise ParseError(f"last column must be {PERF_COLUMN!r}", path, 1)
        cols = tuple(header[:-1])
        if cols != fm.features:
            unknown = [c for c in cols if c not in fm]
            if unknown:
                raise ParseError(f"column {unknown[0]!r} is not a declared feature", path, 1)
            raise ParseError("feature columns must match the feature model order exactly", path, 1)
        ms = MeasurementSet(fm)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
            try:
                bits = [int(v) for v in row[:-1]]
                value = float(row[-1])
            except ValueError:
                raise ParseError("malformed number", path, lineno) from None
            if any(b not in (0, 1) for b in bits):
                raise ParseError("feature columns must be 0 or 1", path, lineno)
            try:
                ms.add(Configuration(fm.features, tuple(bool(b) for b in bits)), value)
            except FeatintError as e:
                raise ParseError(str(e), path, lineno) from None
    return ms


def measurements_to_csv(ms: MeasurementSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(ms.fm.features) + [PERF_COLUMN])
    for config, value in ms.rows:
        w.writerow(list(config.bits()) + [repr(value)])
    return buf.getvalue()


# ---------------------------------------------------------------- models

def model_to_dict(m: InfluenceModel) -> dict:
    return {
        "intercept": m.intercept,
        "terms": [{"features": sorted(t), "coefficient": c} for t, c in m.terms],
        "fit_error": m.fit_error,
    }


def model_from_dict(d) -> InfluenceModel:
    try:
        terms = tuple((frozenset(t["features"]), float(t["coefficient"])) for t in d.get("terms", []))
        return InfluenceModel(float(d["intercept"]), terms, float(d.get("fit_error", 0.0)))
    except (KeyError, TypeError, ValueError, AttributeError):
        raise FeatintError("model must have 'intercept' and 'terms' [{features, coefficient}]") from None


# ---------------------------------------------------------------- synthetic spec

def spec_from_dict(d) -> SyntheticSpec:
    if not isinstance(d, dict):
        raise FeatintError("synthetic spec must be a JSON object")
    fm = feature_model_from_dict(d.get("feature_model", d))
    plan = []
    for k, e in enumerate(d.get("call_plan", [])):
        try:
            plan.append(CallPlanEntry(e["caller"], e["callee"], _expr(e["pc"], f"call plan {k}"),
                                      int(e.get("occurrences", 1))))
        except (KeyError, TypeError):
            raise FeatintError(f"call plan entry {k} needs caller, callee and pc") from None
    return SyntheticSpec(
        fm,
        model_from_dict(d.get("truth", {"intercept": 1.0})),
        tuple(plan),
        float(d.get("noise_sigma", 0.0)),
        int(d.get("seed", 0)),
        dict(d.get("functions", {})),
    )


def spec_to_dict(spec: SyntheticSpec) -> dict:
    d = {
        "feature_model": feature_model_to_dict(spec.fm),
        "truth": model_to_dict(spec.truth),
        "call_plan": [
            {"caller": e.caller, "callee": e.callee, "pc": str(e.pc), "occurrences": e.occurrences}
            for e in spec.call_plan
        ],
        "noise_sigma": spec.noise_sigma,
        "seed": spec.seed,
    }
    if spec.function_names:
        d["functions"] = dict(spec.function_names)
    return d


def load_spec(path) -> SyntheticSpec:
    try:
        return spec_from_dict(_load_json(path))
    except ParseError:
        raise
    except FeatintError as e:
        raise ParseError(str(e), str(path)) from None


# ---------------------------------------------------------------- reports

def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, (frozenset, set)):
        return sorted(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dumps(report) -> str:
    return json.dumps(_jsonable(report), indent=2) + "\n"


def write_report(report, path=None) -> str:
    text = dumps(report)
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    return text
