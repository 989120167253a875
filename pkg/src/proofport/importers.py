"""Readers for the two bundled prover export formats.

toyhol is a strict JSON export of a HOL-like prover: simply typed
constants and definitions, formulas as surface terms. Imported theories
live under the holChurch meta-theory; the missing type annotations of
the Church representation are reconstructed by first-order unification.

toyset is a strict XML export of a set-theory-style prover: untyped
constants, first-order formulas, second-order axiom schemes, and
definition records that expand through the bundled func-definition
pattern. Imported theories live under folSoft.

Both importers collect per-declaration failures into an ImportReport
and keep the successes. A nonempty document that yields no declarations
at all is treated as a broken export and rejected.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional, Union

from .elaboration import (
    Pattern,
    PatternInstance,
    SchematicDecl,
    close_toplevel,
    elaborate_pattern,
)
from .encodings import FOL_SOFT, HOL_CHURCH, LOGIC_NS, fol_ident, hol_ident, logic_library
from .errors import (
    AmbiguousType,
    CheckError,
    EmptyCorpus,
    Malformed,
    SchemaViolation,
    UnificationFailure,
    UnknownIdent,
    UnsupportedVersion,
)
from .kernel import (
    Apply,
    Const,
    Context,
    Declaration,
    DependsOn,
    Ident,
    Lambda,
    Library,
    Metadata,
    Omitted,
    SourceRef,
    Term,
    Theory,
    Var,
    apps,
    check_theory,
    fn_type,
    theory_ident,
)

TOYHOL_NS = "lib://toyhol"
TOYSET_NS = "lib://toyset"
SUPPORTED_VERSION = "1"


# ---------------------------------------------------------------------------
# surface syntax


@dataclass(frozen=True)
class SBase:
    name: str


@dataclass(frozen=True)
class SArrow:
    dom: "SurfaceType"
    cod: "SurfaceType"


@dataclass(frozen=True)
class SMeta:
    """Inference-time unification variable; never escapes the importer."""

    var_id: int


SurfaceType = Union[SBase, SArrow, SMeta]


@dataclass(frozen=True)
class SName:
    name: str


@dataclass(frozen=True)
class SApp:
    fn: "SurfaceTerm"
    arg: "SurfaceTerm"


@dataclass(frozen=True)
class SAbs:
    var: str
    annot: Optional[SurfaceType]
    body: "SurfaceTerm"


@dataclass(frozen=True)
class SBinder:
    kind: str  # only "forall"
    var: str
    annot: Optional[SurfaceType]
    body: "SurfaceTerm"


SurfaceTerm = Union[SName, SApp, SAbs, SBinder]


# ---------------------------------------------------------------------------
# documents and reports


@dataclass(frozen=True)
class DeclRecord:
    kind: str
    name: str
    tp: object = None  # SurfaceType for constants, SurfaceTerm formula otherwise
    definiens: Optional[SurfaceTerm] = None
    deps: tuple[str, ...] = ()
    src: Optional[SourceRef] = None
    notation: Optional[str] = None
    comment: Optional[str] = None
    pvars: tuple[tuple[str, int], ...] = ()  # toyset schemes only


@dataclass(frozen=True)
class TheoryRecord:
    name: str
    decls: tuple[DeclRecord, ...]
    includes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ToyholDoc:
    version: str
    theories: tuple[TheoryRecord, ...]


@dataclass(frozen=True)
class ToysetDoc:
    version: str
    theories: tuple[TheoryRecord, ...]


@dataclass(frozen=True)
class ImportEntry:
    subject: str
    ok: bool
    message: Optional[str] = None


@dataclass(frozen=True)
class ImportReport:
    entries: tuple[ImportEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> tuple[ImportEntry, ...]:
        return tuple(e for e in self.entries if not e.ok)


# ---------------------------------------------------------------------------
# toyhol JSON parsing


def _fail(path: str, message: str = "") -> SchemaViolation:
    return SchemaViolation(path, message)


def _get_str(obj: dict, key: str, path: str) -> str:
    if key not in obj:
        raise _fail(f"{path}.{key}" if path else key, "missing")
    v = obj[key]
    if not isinstance(v, str) or not v:
        raise _fail(f"{path}.{key}" if path else key, "expected nonempty string")
    return v


def _check_keys(obj: dict, allowed: set, path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise _fail(f"{path}.{key}" if path else key, "unknown field")


def _parse_surface_type(obj, path: str) -> SurfaceType:
    if isinstance(obj, str):
        if not obj:
            raise _fail(path, "empty type name")
        return SBase(obj)
    if isinstance(obj, dict):
        _check_keys(obj, {"arrow"}, path)
        arrow = obj.get("arrow")
        if not isinstance(arrow, list) or len(arrow) != 2:
            raise _fail(f"{path}.arrow", "expected a two-element list")
        return SArrow(
            _parse_surface_type(arrow[0], f"{path}.arrow[0]"),
            _parse_surface_type(arrow[1], f"{path}.arrow[1]"),
        )
    raise _fail(path, "expected a type")


def _parse_surface_term(obj, path: str) -> SurfaceTerm:
    if not isinstance(obj, dict):
        raise _fail(path, "expected a term object")
    if "name" in obj:
        _check_keys(obj, {"name"}, path)
        return SName(_get_str(obj, "name", path))
    if "app" in obj:
        _check_keys(obj, {"app"}, path)
        pair = obj["app"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise _fail(f"{path}.app", "expected a two-element list")
        return SApp(
            _parse_surface_term(pair[0], f"{path}.app[0]"),
            _parse_surface_term(pair[1], f"{path}.app[1]"),
        )
    for head, cls in (("abs", SAbs), ("forall", None)):
        if head in obj:
            _check_keys(obj, {head}, path)
            inner = obj[head]
            if not isinstance(inner, dict):
                raise _fail(f"{path}.{head}", "expected an object")
            _check_keys(inner, {"var", "annot", "body"}, f"{path}.{head}")
            var = _get_str(inner, "var", f"{path}.{head}")
            annot = None
            if "annot" in inner:
                annot = _parse_surface_type(inner["annot"], f"{path}.{head}.annot")
            body = _parse_surface_term(inner.get("body"), f"{path}.{head}.body")
            if cls is SAbs:
                return SAbs(var, annot, body)
            return SBinder("forall", var, annot, body)
    raise _fail(path, "unknown term constructor")


_DECL_KINDS = ("type", "constant", "definition", "axiom", "theorem")


def _parse_src(obj, path: str) -> SourceRef:
    if not isinstance(obj, dict):
        raise _fail(path, "expected an object")
    _check_keys(obj, {"file", "line", "col"}, path)
    f = _get_str(obj, "file", path)
    for key in ("line", "col"):
        if not isinstance(obj.get(key), int) or obj[key] < 1:
            raise _fail(f"{path}.{key}", "expected a positive integer")
    return SourceRef(f, obj["line"], obj["col"], obj["line"], obj["col"])


def _parse_toyhol_decl(obj, path: str) -> DeclRecord:
    if not isinstance(obj, dict):
        raise _fail(path, "expected an object")
    _check_keys(
        obj,
        {"kind", "name", "type", "definiens", "deps", "src", "notation", "comment"},
        path,
    )
    kind = _get_str(obj, "kind", path)
    if kind not in _DECL_KINDS:
        raise _fail(f"{path}.kind", f"unknown kind {kind!r}")
    name = _get_str(obj, "name", path)

    tp = None
    if kind == "type":
        if "type" in obj:
            raise _fail(f"{path}.type", "base types carry no type field")
    elif kind in ("constant", "definition"):
        if "type" in obj:
            tp = _parse_surface_type(obj["type"], f"{path}.type")
        elif kind == "constant":
            raise _fail(f"{path}.type", "missing")
    else:
        if "type" not in obj:
            raise _fail(f"{path}.type", "missing")
        tp = _parse_surface_term(obj["type"], f"{path}.type")

    definiens = None
    if "definiens" in obj:
        if kind != "definition":
            raise _fail(f"{path}.definiens", f"not allowed for kind {kind!r}")
        definiens = _parse_surface_term(obj["definiens"], f"{path}.definiens")
    elif kind == "definition":
        raise _fail(f"{path}.definiens", "missing")

    deps: tuple[str, ...] = ()
    if "deps" in obj:
        if kind != "theorem":
            raise _fail(f"{path}.deps", f"not allowed for kind {kind!r}")
        raw = obj["deps"]
        if not isinstance(raw, list) or not all(isinstance(d, str) and d for d in raw):
            raise _fail(f"{path}.deps", "expected a list of names")
        deps = tuple(raw)

    src = _parse_src(obj["src"], f"{path}.src") if "src" in obj else None
    notation = obj.get("notation")
    if notation is not None and not isinstance(notation, str):
        raise _fail(f"{path}.notation", "expected a string")
    comment = obj.get("comment")
    if comment is not None and not isinstance(comment, str):
        raise _fail(f"{path}.comment", "expected a string")
    return DeclRecord(kind, name, tp, definiens, deps, src, notation, comment)


def _parse_theories(raw, parse_decl) -> tuple[TheoryRecord, ...]:
    theories = []
    seen = set()
    for i, th in enumerate(raw):
        path = f"theories[{i}]"
        if not isinstance(th, dict):
            raise _fail(path, "expected an object")
        _check_keys(th, {"name", "decls", "includes"}, path)
        name = _get_str(th, "name", path)
        if name in seen:
            raise _fail(f"{path}.name", f"duplicate theory {name!r}")
        seen.add(name)
        includes = th.get("includes", [])
        if not isinstance(includes, list) or not all(
            isinstance(x, str) and x for x in includes
        ):
            raise _fail(f"{path}.includes", "expected a list of names")
        decls_raw = th.get("decls")
        if not isinstance(decls_raw, list):
            raise _fail(f"{path}.decls", "missing or not a list")
        decls = []
        names = set()
        for j, d in enumerate(decls_raw):
            rec = parse_decl(d, f"{path}.decls[{j}]")
            if rec.name in names:
                raise _fail(f"{path}.decls[{j}].name", f"duplicate {rec.name!r}")
            names.add(rec.name)
            decls.append(rec)
        theories.append(TheoryRecord(name, tuple(decls), tuple(includes)))
    return tuple(theories)


def parse_toyhol(data: bytes) -> ToyholDoc:
    """Parse and strictly validate a toyhol JSON export."""
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        line = getattr(err, "lineno", None)
        raise Malformed(str(err), line) from err
    if not isinstance(obj, dict):
        raise _fail("", "top level must be an object")
    _check_keys(obj, {"version", "theories"}, "")
    version = _get_str(obj, "version", "")
    if version != SUPPORTED_VERSION:
        raise UnsupportedVersion(version)
    raw = obj.get("theories")
    if not isinstance(raw, list):
        raise _fail("theories", "missing or not a list")
    return ToyholDoc(version, _parse_theories(raw, _parse_toyhol_decl))


# ---------------------------------------------------------------------------
# toyset XML parsing

_FOL_BINARY = ("in", "eq", "and", "or", "impl")


def _xml_keys(elem: ET.Element, allowed: set, path: str) -> None:
    for key in elem.attrib:
        if key not in allowed:
            raise _fail(f"{path}.{key}", "unknown attribute")


def _parse_fol_formula(elem: ET.Element, path: str) -> SurfaceTerm:
    tag = elem.tag
    kids = list(elem)
    if tag in _FOL_BINARY:
        _xml_keys(elem, set(), path)
        if len(kids) != 2:
            raise _fail(path, f"{tag} takes two subformulas")
        return SApp(
            SApp(
                SName(tag),
                _parse_fol_formula(kids[0], f"{path}.{tag}[0]"),
            ),
            _parse_fol_formula(kids[1], f"{path}.{tag}[1]"),
        )
    if tag == "not":
        _xml_keys(elem, set(), path)
        if len(kids) != 1:
            raise _fail(path, "not takes one subformula")
        return SApp(SName("not"), _parse_fol_formula(kids[0], f"{path}.not[0]"))
    if tag == "forall":
        _xml_keys(elem, {"var"}, path)
        var = elem.get("var")
        if not var:
            raise _fail(f"{path}.var", "missing")
        if len(kids) != 1:
            raise _fail(path, "forall takes one subformula")
        return SBinder("forall", var, None, _parse_fol_formula(kids[0], f"{path}.forall[0]"))
    if tag in ("var", "const"):
        _xml_keys(elem, {"name"}, path)
        if kids:
            raise _fail(path, f"{tag} takes no children")
        name = elem.get("name")
        if not name:
            raise _fail(f"{path}.name", "missing")
        # bound variables and constants share the name syntax; scoping
        # during import tells them apart
        return SName(name)
    if tag == "papp":
        _xml_keys(elem, {"name"}, path)
        name = elem.get("name")
        if not name:
            raise _fail(f"{path}.name", "missing")
        t: SurfaceTerm = SName(name)
        for k, kid in enumerate(kids):
            t = SApp(t, _parse_fol_formula(kid, f"{path}.papp[{k}]"))
        return t
    raise _fail(path, f"unknown element <{tag}>")


def _parse_src_attr(value: str, path: str) -> SourceRef:
    parts = value.rsplit(":", 2)
    if len(parts) != 3:
        raise _fail(path, "expected file:line:col")
    f, line, col = parts
    try:
        ln, co = int(line), int(col)
    except ValueError:
        raise _fail(path, "line/col must be integers") from None
    if not f or ln < 1 or co < 1:
        raise _fail(path, "expected file:line:col with positive positions")
    return SourceRef(f, ln, co, ln, co)


def _parse_toyset_decl(elem: ET.Element, path: str) -> DeclRecord:
    tag = elem.tag
    common = {"name", "src", "notation", "comment"}
    name = elem.get("name")
    if not name:
        raise _fail(f"{path}.name", "missing")
    src = _parse_src_attr(elem.get("src"), f"{path}.src") if elem.get("src") else None
    notation = elem.get("notation")
    comment = elem.get("comment")
    kids = list(elem)

    if tag == "constant":
        _xml_keys(elem, common, path)
        if kids:
            raise _fail(path, "constant takes no children")
        return DeclRecord("constant", name, src=src, notation=notation, comment=comment)
    if tag in ("axiom", "theorem"):
        allowed = common | ({"deps"} if tag == "theorem" else set())
        _xml_keys(elem, allowed, path)
        if len(kids) != 1:
            raise _fail(path, f"{tag} takes exactly one formula")
        deps = tuple((elem.get("deps") or "").split()) if tag == "theorem" else ()
        formula = _parse_fol_formula(kids[0], f"{path}.{tag}")
        return DeclRecord(tag, name, formula, deps=deps, src=src, notation=notation, comment=comment)
    if tag == "scheme":
        _xml_keys(elem, common, path)
        pvars = []
        formula = None
        for k, kid in enumerate(kids):
            kpath = f"{path}.scheme[{k}]"
            if kid.tag == "pvar":
                if formula is not None:
                    raise _fail(kpath, "pvar after formula")
                _xml_keys(kid, {"name", "arity"}, kpath)
                pname = kid.get("name")
                if not pname:
                    raise _fail(f"{kpath}.name", "missing")
                try:
                    arity = int(kid.get("arity", "1"))
                except ValueError:
                    raise _fail(f"{kpath}.arity", "expected an integer") from None
                if arity < 0:
                    raise _fail(f"{kpath}.arity", "negative arity")
                pvars.append((pname, arity))
            elif formula is None:
                formula = _parse_fol_formula(kid, kpath)
            else:
                raise _fail(kpath, "more than one formula")
        if formula is None:
            raise _fail(path, "scheme needs a formula")
        return DeclRecord(
            "scheme", name, formula, src=src, notation=notation, comment=comment,
            pvars=tuple(pvars),
        )
    if tag == "definition":
        _xml_keys(elem, common, path)
        if len(kids) != 1 or kids[0].tag != "value":
            raise _fail(path, "definition takes exactly one <value>")
        vkids = list(kids[0])
        if len(vkids) != 1:
            raise _fail(f"{path}.value", "expected one term")
        value = _parse_fol_formula(vkids[0], f"{path}.value")
        return DeclRecord(
            "definition", name, definiens=value, src=src, notation=notation, comment=comment
        )
    raise _fail(path, f"unknown element <{tag}>")


def parse_toyset(data: bytes) -> ToysetDoc:
    """Parse and strictly validate a toyset XML export."""
    try:
        root = ET.fromstring(data.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise Malformed(str(err)) from err
    except ET.ParseError as err:
        line = err.position[0] if err.position else None
        raise Malformed(str(err), line) from err
    if root.tag != "export":
        raise _fail(root.tag, "root element must be <export>")
    _xml_keys(root, {"version"}, "export")
    version = root.get("version")
    if not version:
        raise _fail("export.version", "missing")
    if version != SUPPORTED_VERSION:
        raise UnsupportedVersion(version)
    theories = []
    seen = set()
    for i, th in enumerate(root):
        path = f"theory[{i}]"
        if th.tag != "theory":
            raise _fail(path, f"unknown element <{th.tag}>")
        _xml_keys(th, {"name", "includes"}, path)
        name = th.get("name")
        if not name:
            raise _fail(f"{path}.name", "missing")
        if name in seen:
            raise _fail(f"{path}.name", f"duplicate theory {name!r}")
        seen.add(name)
        includes = tuple((th.get("includes") or "").split())
        decls = []
        names = set()
        for j, d in enumerate(th):
            rec = _parse_toyset_decl(d, f"{path}.decl[{j}]")
            if rec.name in names:
                raise _fail(f"{path}.decl[{j}].name", f"duplicate {rec.name!r}")
            names.add(rec.name)
            decls.append(rec)
        theories.append(TheoryRecord(name, tuple(decls), includes))
    return ToysetDoc(version, tuple(theories))


# ---------------------------------------------------------------------------
# Church annotation inference

_HOL_TP = Const(hol_ident("tp"))
_HOL_TM = Const(hol_ident("tm"))
_HOL_BOOL = Const(hol_ident("bool'"))
_HOL_ARROW = Const(hol_ident("arrow"))
_HOL_LAM = Const(hol_ident("lam"))
_HOL_APP = Const(hol_ident("app"))
_HOL_FORALL = Const(hol_ident("forall"))
_HOL_IMPL = Const(hol_ident("impl"))
_HOL_EQ = Const(hol_ident("eq"))
_HOL_DED = Const(hol_ident("ded"))

_BOOL_T = SBase("bool")

LOCAL_NS = "lib://surface"


def _default_resolve(name: str) -> Term:
    return Const(Ident(LOCAL_NS, "local", name))


class _Unifier:
    def __init__(self) -> None:
        self.subst: dict[int, SurfaceType] = {}
        self.counter = 0

    def fresh(self) -> SMeta:
        self.counter += 1
        return SMeta(self.counter)

    def walk(self, t: SurfaceType) -> SurfaceType:
        while isinstance(t, SMeta) and t.var_id in self.subst:
            t = self.subst[t.var_id]
        return t

    def occurs(self, m: SMeta, t: SurfaceType) -> bool:
        t = self.walk(t)
        if isinstance(t, SMeta):
            return t.var_id == m.var_id
        if isinstance(t, SArrow):
            return self.occurs(m, t.dom) or self.occurs(m, t.cod)
        return False

    def unify(self, a: SurfaceType, b: SurfaceType, where: str) -> None:
        a, b = self.walk(a), self.walk(b)
        if isinstance(a, SMeta):
            if isinstance(b, SMeta) and a.var_id == b.var_id:
                return
            if self.occurs(a, b):
                raise UnificationFailure(where, "occurs check failed")
            self.subst[a.var_id] = b
            return
        if isinstance(b, SMeta):
            self.unify(b, a, where)
            return
        if isinstance(a, SBase) and isinstance(b, SBase):
            if a.name != b.name:
                raise UnificationFailure(where, f"{a.name} vs {b.name}")
            return
        if isinstance(a, SArrow) and isinstance(b, SArrow):
            self.unify(a.dom, b.dom, where)
            self.unify(a.cod, b.cod, where)
            return
        raise UnificationFailure(where, f"{_fmt_stype(a)} vs {_fmt_stype(b)}")

    def zonk(self, t: SurfaceType, owner: str) -> SurfaceType:
        t = self.walk(t)
        if isinstance(t, SMeta):
            raise AmbiguousType(owner)
        if isinstance(t, SArrow):
            return SArrow(self.zonk(t.dom, owner), self.zonk(t.cod, owner))
        return t


def _fmt_stype(t: SurfaceType) -> str:
    match t:
        case SBase(n):
            return n
        case SArrow(d, c):
            return f"({_fmt_stype(d)} -> {_fmt_stype(c)})"
        case SMeta(i):
            return f"?{i}"
    return repr(t)


def _spine(t: SurfaceTerm) -> tuple[SurfaceTerm, list[SurfaceTerm]]:
    args: list[SurfaceTerm] = []
    while isinstance(t, SApp):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def infer_church_annotations(
    env: Mapping[str, SurfaceType],
    t: SurfaceTerm,
    base_types: Mapping[str, Ident] | None = None,
    resolve: Callable[[str], Optional[Term]] | None = None,
) -> tuple[Term, SurfaceType]:
    """Reconstruct the type annotations of the Church representation.

    Simple-type inference by first-order unification: `app` and `lam`
    come back fully annotated, `forall` carries its domain, and the
    logical heads impl/eq (when not shadowed by env) map to the
    holChurch connectives, eq at a fresh instance type per occurrence.

    Returns the annotated kernel term and the inferred surface type.
    Raises UnificationFailure on a type clash, AmbiguousType when no
    ground type is forced, UnknownIdent for unbound names.
    """
    uni = _Unifier()
    bases = dict(base_types or {})
    resolver = resolve or _default_resolve

    def tt(st: SurfaceType, owner: str) -> Term:
        st = uni.zonk(st, owner)
        match st:
            case SBase("bool"):
                return _HOL_BOOL
            case SBase(n):
                if n not in bases:
                    raise UnknownIdent(f"base type {n}")
                return Const(bases[n])
            case SArrow(d, c):
                return apps(_HOL_ARROW, tt(d, owner), tt(c, owner))
        raise AmbiguousType(owner)

    def logical(name: str, scope: list[tuple[str, SurfaceType]]) -> bool:
        return name in ("impl", "eq") and name not in env and not any(
            n == name for n, _ in scope
        )

    def ti(t: SurfaceTerm, scope: list[tuple[str, SurfaceType]]):
        """Returns (build, type): build() makes the kernel term."""
        match t:
            case SName(x):
                for k, (n, st) in enumerate(reversed(scope)):
                    if n == x:
                        return (lambda: Var(k)), st
                if x in env:
                    st = env[x]
                    term = resolver(x)
                    if term is None:
                        raise UnknownIdent(x)
                    return (lambda: term), st
                if logical(x, scope):
                    raise UnificationFailure(x, "logical constant must be applied")
                raise UnknownIdent(x)
            case SApp():
                head, args = _spine(t)
                if isinstance(head, SName) and logical(head.name, scope):
                    return ti_logical(head.name, args, scope)
                fb, ft = ti(t.fn, scope)
                ab, at = ti(t.arg, scope)
                res = uni.fresh()
                uni.unify(ft, SArrow(at, res), _where(t.fn))
                def build(fb=fb, ab=ab, at=at, res=res):
                    w = _where(t)
                    return apps(_HOL_APP, tt(at, w), tt(res, w), fb(), ab())
                return build, res
            case SAbs(x, annot, body):
                vt = annot or uni.fresh()
                bb, bt = ti(body, scope + [(x, vt)])
                def build(x=x, vt=vt, bb=bb, bt=bt):
                    dom = tt(vt, x)
                    return apps(
                        _HOL_LAM, dom, tt(bt, x), Lambda(x, Apply(_HOL_TM, dom), bb())
                    )
                return build, SArrow(vt, bt)
            case SBinder("forall", x, annot, body):
                vt = annot or uni.fresh()
                bb, bt = ti(body, scope + [(x, vt)])
                uni.unify(bt, _BOOL_T, x)
                def build(x=x, vt=vt, bb=bb):
                    dom = tt(vt, x)
                    return apps(
                        _HOL_FORALL, dom, Lambda(x, Apply(_HOL_TM, dom), bb())
                    )
                return build, _BOOL_T
        raise UnificationFailure(_where(t), "unsupported surface form")

    def ti_logical(name: str, args: list[SurfaceTerm], scope):
        if len(args) != 2:
            raise UnificationFailure(name, f"{name} takes two arguments")
        lb, lt = ti(args[0], scope)
        rb, rt = ti(args[1], scope)
        if name == "impl":
            uni.unify(lt, _BOOL_T, name)
            uni.unify(rt, _BOOL_T, name)
            return (lambda: apps(_HOL_IMPL, lb(), rb())), _BOOL_T
        inst = uni.fresh()
        uni.unify(lt, inst, name)
        uni.unify(rt, inst, name)
        return (lambda: apps(_HOL_EQ, tt(inst, "eq"), lb(), rb())), _BOOL_T

    build, ty = ti(t, [])
    term = build()
    return term, uni.zonk(ty, "result")


def _where(t: SurfaceTerm) -> str:
    match t:
        case SName(n):
            return n
        case SApp():
            head, _ = _spine(t)
            return _where(head)
        case SAbs(v, _, _):
            return v
        case SBinder(_, v, _, _):
            return v
    return "term"


# ---------------------------------------------------------------------------
# toyhol import

_LOGICS = logic_library()


class _TheoryBuilder:
    """Accumulates checked declarations for one imported theory."""

    def __init__(self, ns: str, name: str, meta_theory: Ident,
                 includes: tuple[Ident, ...], done: list[Theory]):
        self.ns = ns
        self.name = name
        self.ident = theory_ident(ns, name)
        self.meta_theory = meta_theory
        self.includes = includes
        self.done = done
        self.decls: list[Declaration] = []

    def ident_for(self, local: str) -> Ident:
        return Ident(self.ns, self.name, local)

    def snapshot(self, extra: tuple[Declaration, ...] = ()) -> Library:
        cur = Theory(
            self.ident,
            meta_theory=self.meta_theory,
            includes=self.includes,
            decls=tuple(self.decls) + extra,
        )
        return Library(self.ns, tuple(self.done) + (cur,), deps=(_LOGICS,))

    def try_add(self, cands: tuple[Declaration, ...]) -> None:
        """Check candidates in the current snapshot; raise on failure."""
        report = check_theory(self.snapshot(cands), self.ident)
        new = {c.name for c in cands}
        for res in report.results:
            if res.subject in new and not res.ok:
                raise CheckError(f"{res.subject.name}: {res.message}")
        self.decls.extend(cands)

    def finish(self) -> Theory:
        return Theory(
            self.ident,
            meta_theory=self.meta_theory,
            includes=self.includes,
            decls=tuple(self.decls),
        )


def _resolve_includes(
    record: TheoryRecord, by_name: dict[str, Theory], ns: str
) -> tuple[Ident, ...]:
    out = []
    for inc in record.includes:
        if inc not in by_name:
            raise UnknownIdent(f"included theory {inc}")
        out.append(theory_ident(ns, inc))
    return tuple(out)


def _included_names(record: TheoryRecord, records: dict[str, TheoryRecord]) -> list[str]:
    seen: list[str] = []
    stack = list(record.includes)
    while stack:
        cur = stack.pop()
        if cur in seen or cur not in records:
            continue
        seen.append(cur)
        stack.extend(records[cur].includes)
    return seen


def _meta(rec: DeclRecord, kind: str) -> Metadata:
    return Metadata(
        kind=kind,
        source_ref=rec.src,
        comments=(rec.comment,) if rec.comment else (),
        notation=rec.notation,
    )


def import_toyhol(
    doc: ToyholDoc, allow_empty: bool = False
) -> tuple[Library, ImportReport]:
    """Build a holChurch-based Library from a parsed toyhol document.

    Declarations are converted and kernel-checked one at a time; a
    failure is recorded in the report and the declaration dropped, the
    rest continue. Raises EmptyCorpus when a document with records ends
    up contributing nothing (unless allow_empty).
    """
    entries: list[ImportEntry] = []
    done: list[Theory] = []
    by_name: dict[str, Theory] = {}
    records = {t.name: t for t in doc.theories}
    # per-theory surface environments for the annotation inference:
    # term name -> (surface type, declaring ident)
    type_envs: dict[str, dict[str, Ident]] = {}
    term_envs: dict[str, dict[str, tuple[SurfaceType, Ident]]] = {}
    stmt_names: dict[str, dict[str, Ident]] = {}
    total_records = 0

    for trec in doc.theories:
        total_records += len(trec.decls)
        try:
            includes = _resolve_includes(trec, by_name, TOYHOL_NS)
        except UnknownIdent as err:
            entries.append(ImportEntry(trec.name, False, f"UnknownIdent: {err}"))
            continue
        builder = _TheoryBuilder(TOYHOL_NS, trec.name, HOL_CHURCH, includes, done)
        base_types: dict[str, Ident] = {}
        terms: dict[str, tuple[SurfaceType, Ident]] = {}
        stmts: dict[str, Ident] = {}
        for inc in reversed(_included_names(trec, records)):
            base_types.update(type_envs.get(inc, {}))
            terms.update(term_envs.get(inc, {}))
            stmts.update(stmt_names.get(inc, {}))

        for rec in trec.decls:
            ident = builder.ident_for(rec.name)
            try:
                cands, env_type = _toyhol_decl(rec, ident, terms, base_types, stmts)
                builder.try_add(cands)
            except CheckError as err:
                entries.append(
                    ImportEntry(str(ident), False, f"{type(err).__name__}: {err}")
                )
                continue
            entries.append(ImportEntry(str(ident), True))
            if rec.kind == "type":
                base_types[rec.name] = ident
            elif env_type is not None:
                terms[rec.name] = (env_type, ident)
            elif rec.kind in ("axiom", "theorem"):
                stmts[rec.name] = ident

        th = builder.finish()
        done.append(th)
        by_name[trec.name] = th
        type_envs[trec.name] = base_types
        term_envs[trec.name] = terms
        stmt_names[trec.name] = stmts

    lib = Library(TOYHOL_NS, tuple(done), deps=(_LOGICS,))
    ndecls = sum(len(t.decls) for t in done)
    if total_records > 0 and ndecls == 0 and not allow_empty:
        raise EmptyCorpus("document has records but the import produced nothing")
    return lib, ImportReport(tuple(entries))


def _toyhol_decl(
    rec: DeclRecord,
    ident: Ident,
    terms: dict[str, tuple[SurfaceType, Ident]],
    base_types: dict[str, Ident],
    stmts: dict[str, Ident],
) -> tuple[tuple[Declaration, ...], Optional[SurfaceType]]:
    """Convert one record; also returns the surface type to record in
    the inference environment (constants and definitions only)."""
    env = {n: st for n, (st, _) in terms.items()}

    def resolver(name: str) -> Optional[Term]:
        if name in terms:
            return Const(terms[name][1])
        return None

    if rec.kind == "type":
        return (Declaration(ident, tp=_HOL_TP, meta=_meta(rec, "type")),), None
    if rec.kind == "constant":
        tp_term = _stype_term(rec.tp, base_types)
        decl = Declaration(
            ident, tp=Apply(_HOL_TM, tp_term), meta=_meta(rec, "constant")
        )
        return (decl,), rec.tp
    if rec.kind == "definition":
        term, inferred = infer_church_annotations(
            env, rec.definiens, base_types, resolver
        )
        declared = rec.tp if rec.tp is not None else inferred
        tp_term = _stype_term(declared, base_types)
        decl = Declaration(
            ident,
            tp=Apply(_HOL_TM, tp_term),
            definiens=term,
            meta=_meta(rec, "definition"),
        )
        return (decl,), declared
    # axiom or theorem: the type field is a formula
    term, ftype = infer_church_annotations(env, rec.tp, base_types, resolver)
    uni = _Unifier()
    uni.unify(ftype, _BOOL_T, rec.name)
    if rec.kind == "axiom":
        decl = Declaration(
            ident, tp=Apply(_HOL_DED, term), proof=Omitted(), meta=_meta(rec, "axiom")
        )
        return (decl,), None
    ids = []
    for dep in rec.deps:
        if dep not in stmts:
            raise UnknownIdent(f"dependency {dep}")
        ids.append(stmts[dep])
    proof = DependsOn(tuple(ids)) if ids else Omitted()
    decl = Declaration(
        ident, tp=Apply(_HOL_DED, term), proof=proof, meta=_meta(rec, "theorem")
    )
    return (decl,), None


def _stype_term(st: SurfaceType, base_types: Mapping[str, Ident]) -> Term:
    match st:
        case SBase("bool"):
            return _HOL_BOOL
        case SBase(n):
            if n not in base_types:
                raise UnknownIdent(f"base type {n}")
            return Const(base_types[n])
        case SArrow(d, c):
            return apps(
                _HOL_ARROW, _stype_term(d, base_types), _stype_term(c, base_types)
            )
    raise AmbiguousType(_fmt_stype(st))


# ---------------------------------------------------------------------------
# toyset import

_FOL_SET = Const(fol_ident("set"))
_FOL_PROP = Const(fol_ident("prop"))
_FOL_DED = Const(fol_ident("ded"))
_FOL_OPS = {
    "in": Const(fol_ident("in'")),
    "eq": Const(fol_ident("eq'")),
    "and": Const(fol_ident("and'")),
    "or": Const(fol_ident("or'")),
    "impl": Const(fol_ident("impl'")),
    "not": Const(fol_ident("not'")),
}


def func_definition_pattern() -> Pattern:
    """Mizar-style functor definition over folSoft.

    One parameter (the defining value); produces the new constant and
    its defining equation as an axiom.
    """
    def pid(name: str) -> Ident:
        return Ident(LOGIC_NS, "patterns", name)

    fn = Const(pid("fn"))
    body = (
        Declaration(pid("fn"), tp=_FOL_SET, meta=Metadata(kind="constant")),
        Declaration(
            pid("def"),
            tp=Apply(_FOL_DED, apps(_FOL_OPS["eq"], fn, Var(0))),
            meta=Metadata(kind="axiom"),
        ),
    )
    return Pattern(pid("func-definition"), Context().extend("value", _FOL_SET), body)


def _fol_term(
    t: SurfaceTerm, scope: list[str], consts: Mapping[str, Ident], where: str
) -> Term:
    """First-order surface formula to a folSoft kernel term."""
    match t:
        case SName(x):
            for k, n in enumerate(reversed(scope)):
                if n == x:
                    return Var(k)
            if x in _FOL_OPS:
                raise UnificationFailure(x, "connective must be applied")
            if x in consts:
                return Const(consts[x])
            raise UnknownIdent(x)
        case SApp():
            head, args = _spine(t)
            if isinstance(head, SName) and head.name in _FOL_OPS and head.name not in scope:
                op = _FOL_OPS[head.name]
                want = 1 if head.name == "not" else 2
                if len(args) != want:
                    raise UnificationFailure(head.name, f"takes {want} argument(s)")
                return apps(op, *(_fol_term(a, scope, consts, where) for a in args))
            return apps(
                _fol_term(head, scope, consts, where),
                *(_fol_term(a, scope, consts, where) for a in args),
            )
        case SBinder("forall", x, _, body):
            inner = _fol_term(body, scope + [x], consts, where)
            return Apply(
                Const(fol_ident("forallSet")), Lambda(x, _FOL_SET, inner)
            )
    raise UnificationFailure(where, "unsupported formula form")


def _pvar_type(arity: int) -> Term:
    t: Term = _FOL_PROP
    for _ in range(arity):
        t = fn_type(_FOL_SET, t)
    return t


def import_toyset(
    doc: ToysetDoc, allow_empty: bool = False
) -> tuple[Library, ImportReport]:
    """Build a folSoft-based Library from a parsed toyset document.

    Schemes close over their predicate variables with an explicit Pi
    prefix; definition records expand through the func-definition
    pattern. Failure handling matches import_toyhol.
    """
    entries: list[ImportEntry] = []
    done: list[Theory] = []
    by_name: dict[str, Theory] = {}
    records = {t.name: t for t in doc.theories}
    const_envs: dict[str, dict[str, Ident]] = {}
    stmt_envs: dict[str, dict[str, Ident]] = {}
    funcdef = func_definition_pattern()
    registry = {funcdef.name: funcdef}
    total_records = 0

    for trec in doc.theories:
        total_records += len(trec.decls)
        try:
            includes = _resolve_includes(trec, by_name, TOYSET_NS)
        except UnknownIdent as err:
            entries.append(ImportEntry(trec.name, False, f"UnknownIdent: {err}"))
            continue
        builder = _TheoryBuilder(TOYSET_NS, trec.name, FOL_SOFT, includes, done)
        consts: dict[str, Ident] = {}
        stmts: dict[str, Ident] = {}
        for inc in reversed(_included_names(trec, records)):
            consts.update(const_envs.get(inc, {}))
            stmts.update(stmt_envs.get(inc, {}))

        for rec in trec.decls:
            ident = builder.ident_for(rec.name)
            try:
                cands = _toyset_decl(rec, ident, consts, stmts, builder, registry)
                builder.try_add(cands)
            except CheckError as err:
                entries.append(
                    ImportEntry(str(ident), False, f"{type(err).__name__}: {err}")
                )
                continue
            entries.append(ImportEntry(str(ident), True))
            if rec.kind == "constant":
                consts[rec.name] = ident
            elif rec.kind == "definition":
                # the generated constant is name/fn
                consts[rec.name] = cands[0].name
            elif rec.kind in ("axiom", "theorem", "scheme"):
                stmts[rec.name] = ident

        th = builder.finish()
        done.append(th)
        by_name[trec.name] = th
        const_envs[trec.name] = consts
        stmt_envs[trec.name] = stmts

    lib = Library(TOYSET_NS, tuple(done), deps=(_LOGICS,))
    ndecls = sum(len(t.decls) for t in done)
    if total_records > 0 and ndecls == 0 and not allow_empty:
        raise EmptyCorpus("document has records but the import produced nothing")
    return lib, ImportReport(tuple(entries))


def _toyset_decl(
    rec: DeclRecord,
    ident: Ident,
    consts: dict[str, Ident],
    stmts: dict[str, Ident],
    builder: _TheoryBuilder,
    registry: dict[Ident, Pattern],
) -> tuple[Declaration, ...]:
    if rec.kind == "constant":
        return (Declaration(ident, tp=_FOL_SET, meta=_meta(rec, "constant")),)
    if rec.kind in ("axiom", "theorem"):
        formula = _fol_term(rec.tp, [], consts, rec.name)
        tp = Apply(_FOL_DED, formula)
        if rec.kind == "axiom":
            return (Declaration(ident, tp=tp, proof=Omitted(), meta=_meta(rec, "axiom")),)
        ids = []
        for dep in rec.deps:
            if dep not in stmts:
                raise UnknownIdent(f"dependency {dep}")
            ids.append(stmts[dep])
        proof = DependsOn(tuple(ids)) if ids else Omitted()
        return (Declaration(ident, tp=tp, proof=proof, meta=_meta(rec, "theorem")),)
    if rec.kind == "scheme":
        ctx = Context()
        pnames = []
        for pname, arity in rec.pvars:
            ctx = ctx.extend(pname, _pvar_type(arity))
            pnames.append(pname)
        formula = _fol_term(rec.tp, pnames, consts, rec.name)
        sd = SchematicDecl(ctx, Apply(_FOL_DED, formula))
        return (
            Declaration(
                ident, tp=close_toplevel(sd), proof=Omitted(), meta=_meta(rec, "axiom")
            ),
        )
    if rec.kind == "definition":
        value = _fol_term(rec.definiens, [], consts, rec.name)
        pattern_name = Ident(LOGIC_NS, "patterns", "func-definition")
        inst = PatternInstance(ident, pattern_name, (value,))
        decls = elaborate_pattern(builder.snapshot(), inst, registry)
        out = []
        for d in decls:
            meta = replace(
                d.meta,
                source_ref=rec.src,
                comments=(rec.comment,) if rec.comment else (),
                notation=rec.notation,
            )
            out.append(replace(d, meta=meta))
        return tuple(out)
    raise SchemaViolation(rec.kind, "unknown record kind")


# ---------------------------------------------------------------------------
# source reference recovery

_NAME_CHARS = re.compile(r"[A-Za-z0-9_']")


def _find_in_line(line: str, name: str, markers: tuple[str, ...]) -> Optional[int]:
    """Column (0-based) of a token-boundary `name` followed by a marker."""
    start = 0
    while True:
        col = line.find(name, start)
        if col < 0:
            return None
        end = col + len(name)
        before_ok = col == 0 or not _NAME_CHARS.match(line[col - 1])
        after_ok = end >= len(line) or not _NAME_CHARS.match(line[end])
        if before_ok and after_ok:
            rest = line[end:].lstrip()
            if any(rest.startswith(m) for m in markers):
                return col
        start = end


def recover_source_refs(
    lib: Library,
    sources: Mapping[str, str],
    markers: tuple[str, ...] = (":=", ":"),
) -> tuple[Library, ImportReport]:
    """Attach source locations recovered by scanning exported sources.

    Declarations that already carry a SourceRef are untouched. For the
    rest, files are scanned in sorted name order for the first
    token-boundary occurrence of the local name followed by one of the
    markers; the match becomes a range covering the name. Longer
    markers take precedence (`:=` before `:`).
    """
    # ":" is a prefix of ":=", so sort longest first for the startswith test
    marks = tuple(sorted(markers, key=len, reverse=True))
    entries: list[ImportEntry] = []
    new_theories = []
    for th in lib.theories:
        new_decls = []
        for decl in th.decls:
            if decl.meta.source_ref is not None:
                new_decls.append(decl)
                continue
            found = None
            hits = 0
            for fname in sorted(sources):
                for lineno, line in enumerate(sources[fname].splitlines(), start=1):
                    col = _find_in_line(line, decl.name.name, marks)
                    if col is not None:
                        hits += 1
                        if found is None:
                            found = SourceRef(
                                fname,
                                lineno,
                                col + 1,
                                lineno,
                                col + len(decl.name.name),
                            )
            if found is None:
                entries.append(
                    ImportEntry(str(decl.name), False, "no source location found")
                )
                new_decls.append(decl)
            else:
                if hits > 1:
                    entries.append(
                        ImportEntry(
                            str(decl.name), True, f"{hits} candidate locations, first taken"
                        )
                    )
                new_decls.append(
                    replace(decl, meta=replace(decl.meta, source_ref=found))
                )
        new_theories.append(replace(th, decls=tuple(new_decls)))
    out = Library(lib.namespace, tuple(new_theories), lib.morphisms, deps=lib.deps)
    return out, ImportReport(tuple(entries))


def safe_filename(name: str) -> str:
    """Case-insensitive-safe file name: only [a-z0-9._-] survive.

    Everything else, uppercase included, becomes %XX per UTF-8 byte, so
    names differing only in case map to distinct files everywhere.
    """
    out = []
    for ch in name:
        if ch.islower() and ch.isascii() or ch.isdigit() or ch in "._-":
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
    return "".join(out)
