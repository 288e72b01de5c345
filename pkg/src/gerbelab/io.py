"""Declarative problem files (YAML) for the command-line interface.

Every file carries ``kind`` (nerve | system | transition | extension |
loop | lifts | bundle) and ``format: v1``.  Nested references (a system
naming its nerve by path) resolve relative to the referring file.  The
exact grammars are documented in docs/formats.md with one committed
example per kind under sample_inputs/.
"""

import hashlib
import os

import numpy as np
import yaml

from .cech import TwistedLocalSystem
from .coeffs import (Automorphism, CentralExtension, CoefficientGroup,
                     FiniteGroup)
from .connection import two_chart_sphere
from .errors import ProblemFileError
from .lifting import LiftChoice, TransitionData
from .nerve import build_nerve
from .schwinger import LoopPolynomial

FORMAT_VERSION = "v1"
KINDS = ("nerve", "system", "transition", "extension", "loop", "lifts", "bundle")


def sha256_of(path):
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            digest.update(fh.read())
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    return digest.hexdigest()


def load_document(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ProblemFileError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProblemFileError(f"{path}: document must be a mapping")
    version = doc.get("format")
    if version != FORMAT_VERSION:
        raise ProblemFileError(
            f"{path}: unsupported format {version!r} (expected {FORMAT_VERSION!r})")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ProblemFileError(f"{path}: unknown kind {kind!r}")
    return doc


def _need(doc, key, path):
    if key not in doc:
        raise ProblemFileError(f"{path}: missing required key {key!r}")
    return doc[key]


def parse_nerve(doc, path="<inline>"):
    vertices = _need(doc, "vertices", path)
    maximal = _need(doc, "maximal", path)
    if not isinstance(vertices, int) or vertices < 1:
        raise ProblemFileError(f"{path}: vertices must be a positive integer")
    if not isinstance(maximal, list):
        raise ProblemFileError(f"{path}: maximal must be a list of simplices")
    try:
        return build_nerve(maximal, vertex_count=vertices)
    except Exception as exc:
        raise ProblemFileError(f"{path}: bad nerve: {exc}") from exc


def _resolve_nerve(doc, path):
    ref = _need(doc, "nerve", path)
    if isinstance(ref, str):
        sub = os.path.join(os.path.dirname(os.path.abspath(path)), ref)
        subdoc = load_document(sub)
        if subdoc["kind"] != "nerve":
            raise ProblemFileError(f"{path}: {ref} is not a nerve file")
        return parse_nerve(subdoc, sub)
    if isinstance(ref, dict):
        return parse_nerve(ref, path)
    raise ProblemFileError(f"{path}: nerve must be a path or an inline mapping")


def parse_coefficients(doc, path="<inline>"):
    kind = doc.get("set", "integers")
    involution = doc.get("involution", "identity")
    tolerance = doc.get("tolerance")
    try:
        if kind == "integers":
            return CoefficientGroup.integers(involution=involution)
        if kind == "mod":
            return CoefficientGroup.integers_mod(int(_need(doc, "modulus", path)),
                                                 involution=involution)
        if kind == "reals":
            return CoefficientGroup.reals(involution=involution,
                                          tolerance=tolerance or 1e-9)
        if kind == "circle":
            return CoefficientGroup.circle(involution=involution,
                                           tolerance=tolerance or 1e-9)
    except Exception as exc:
        raise ProblemFileError(f"{path}: bad coefficients: {exc}") from exc
    raise ProblemFileError(f"{path}: unknown coefficient set {kind!r}")


def _parse_edge_list(entries, what, path):
    out = {}
    for item in entries or []:
        if not (isinstance(item, list) and len(item) == 3):
            raise ProblemFileError(f"{path}: {what} entries are [i, j, value]")
        i, j, v = item
        out[(min(i, j), max(i, j))] = v
    return out


def parse_system(path):
    doc = load_document(path)
    if doc["kind"] != "system":
        raise ProblemFileError(f"{path}: expected a system file")
    nerve = _resolve_nerve(doc, path)
    coeff = parse_coefficients(doc.get("coefficients", {}), path)
    twist = _parse_edge_list(doc.get("twist"), "twist", path)
    try:
        return TwistedLocalSystem(nerve, coeff, twist)
    except Exception as exc:
        raise ProblemFileError(f"{path}: bad system: {exc}") from exc


def parse_group(doc, path):
    if isinstance(doc, dict) and "cyclic" in doc:
        return FiniteGroup.cyclic(int(doc["cyclic"]))
    if isinstance(doc, dict) and "table" in doc:
        try:
            return FiniteGroup(doc["table"])
        except Exception as exc:
            raise ProblemFileError(f"{path}: bad group table: {exc}") from exc
    raise ProblemFileError(f"{path}: group must give 'cyclic' or 'table'")


def parse_automorphism(doc, group, path):
    if doc in (None, "identity"):
        return Automorphism.identity(group)
    if doc == "negation":
        return Automorphism.negation(group)
    if isinstance(doc, dict) and "permutation" in doc:
        try:
            return Automorphism(group, doc["permutation"])
        except Exception as exc:
            raise ProblemFileError(f"{path}: bad automorphism: {exc}") from exc
    raise ProblemFileError(f"{path}: automorphism must be identity, negation, "
                           f"or a permutation")


def parse_transition(path):
    doc = load_document(path)
    if doc["kind"] != "transition":
        raise ProblemFileError(f"{path}: expected a transition file")
    nerve = _resolve_nerve(doc, path)
    group = parse_group(_need(doc, "group", path), path)
    sigma = parse_automorphism(doc.get("sigma"), group, path)
    g = _parse_edge_list(doc.get("edges"), "edges", path)
    eps = _parse_edge_list(doc.get("twist"), "twist", path)
    try:
        return TransitionData(nerve, group, sigma, g, eps)
    except Exception as exc:
        raise ProblemFileError(f"{path}: bad transition data: {exc}") from exc


def parse_extension(path):
    doc = load_document(path)
    if doc["kind"] != "extension":
        raise ProblemFileError(f"{path}: expected an extension file")
    hat = parse_group(_need(doc, "hat_group", path), path)
    base = parse_group(_need(doc, "base_group", path), path)
    sigma_hat = parse_automorphism(doc.get("sigma_hat"), hat, path)
    sigma = parse_automorphism(doc.get("sigma"), base, path)
    try:
        return CentralExtension(hat, base,
                                _need(doc, "projection", path),
                                _need(doc, "section", path),
                                _need(doc, "kernel", path),
                                sigma_hat=sigma_hat, sigma=sigma)
    except Exception as exc:
        raise ProblemFileError(f"{path}: bad extension: {exc}") from exc


def parse_lifts(path, nerve):
    doc = load_document(path)
    if doc["kind"] != "lifts":
        raise ProblemFileError(f"{path}: expected a lifts file")
    table = _parse_edge_list(doc.get("edges"), "edges", path)
    missing = [e for e in nerve.simplices[1] if e not in table]
    if missing:
        raise ProblemFileError(f"{path}: lifts missing for edges {missing}")
    return LiftChoice(tuple(int(table[e]) for e in nerve.simplices[1]))


def parse_loop(path):
    doc = load_document(path)
    if doc["kind"] != "loop":
        raise ProblemFileError(f"{path}: expected a loop file")
    size = _need(doc, "size", path)
    coeffs = {}
    for entry in _need(doc, "coefficients", path):
        m = _need(entry, "mode", path)
        flat = _need(entry, "matrix", path)
        if len(flat) != size * size:
            raise ProblemFileError(
                f"{path}: mode {m} needs {size * size} entries, got {len(flat)}")
        try:
            vals = [complex(float(re), float(im)) for re, im in flat]
        except (TypeError, ValueError) as exc:
            raise ProblemFileError(
                f"{path}: matrix entries are [re, im] pairs: {exc}") from exc
        coeffs[int(m)] = np.array(vals, dtype=complex).reshape(size, size)
    try:
        return LoopPolynomial(size, coeffs, skew=bool(doc.get("skew", False)))
    except Exception as exc:
        raise ProblemFileError(f"{path}: bad loop: {exc}") from exc


def parse_bundle(path):
    """Returns (BundleData, options dict with resolution/corruption info)."""
    doc = load_document(path)
    if doc["kind"] != "bundle":
        raise ProblemFileError(f"{path}: expected a bundle file")
    model = _need(doc, "model", path)
    if model != "two-chart-sphere":
        raise ProblemFileError(f"{path}: unknown bundle model {model!r}")
    options = {
        "clutching": int(doc.get("clutching", 0)),
        "resolution": int(doc.get("resolution", 200)),
        "inner": float(doc.get("inner", 0.7)),
        "outer": float(doc.get("outer", 1.4)),
        "extent": float(doc.get("extent", 1.6)),
    }
    if options["resolution"] < 8:
        raise ProblemFileError(f"{path}: resolution too small")
    corruption = doc.get("corruption")
    if corruption is not None:
        need = {"chart", "other", "index", "factor"}
        if not isinstance(corruption, dict) or not need <= set(corruption):
            raise ProblemFileError(
                f"{path}: corruption needs keys {sorted(need)}")
        options["corruption"] = corruption

    def build(resolution=None):
        data = two_chart_sphere(options["clutching"],
                                resolution=resolution or options["resolution"],
                                inner=options["inner"], outer=options["outer"],
                                extent=options["extent"])
        if corruption is not None:
            factor = corruption["factor"]
            factor = complex(factor[0], factor[1]) if isinstance(factor, list) \
                else complex(factor)
            data.corrupt_sample(int(corruption["chart"]), int(corruption["other"]),
                                tuple(int(x) for x in corruption["index"]), factor)
        return data

    return build, options
