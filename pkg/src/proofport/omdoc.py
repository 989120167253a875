"""Deterministic XML interchange for libraries.

The vocabulary is a small frozen OMDoc-inspired dialect, not the full
external schema: omdoc > theory > include | constant, with terms as
OMS/OMV/OMA/OMBIND and morphisms as assignment lists. Serialization is
a pure function of the library value: fixed attribute order, two-space
indentation, newline-terminated lines, UTF-8. No structure sharing is
attempted; each subterm is inlined, and the serialized element count
stays linear in the term node count.

Variables carry their de Bruijn index plus the binder's name hint. The
index alone is authoritative; the hint is for human readers.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .errors import DanglingIdent, Malformed, SchemaViolation, UnsupportedVersion
from .kernel import (
    Apply,
    Const,
    Declaration,
    DependsOn,
    Ident,
    KINDS,
    Lambda,
    Library,
    Metadata,
    Omitted,
    Pi,
    Proof,
    ProofTerm,
    SourceRef,
    SubIn,
    SubOut,
    SubType,
    Term,
    Theory,
    TypeKind,
    Var,
    constants_of,
    theory_ident,
)
from .morphisms import Morphism

OMDOC_VERSION = "1"
FILE_EXTENSION = ".omdoc.xml"


# ---------------------------------------------------------------------------
# escaping


def _a(s: str) -> str:
    """Attribute-safe text. Whitespace must be escaped too: XML parsers
    normalize raw newlines and tabs in attribute values to spaces."""
    return (
        s.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("\n", "&#10;")
        .replace("\t", "&#9;")
        .replace("\r", "&#13;")
    )


def _t(s: str) -> str:
    return (
        s.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace("\r", "&#13;")
    )


# ---------------------------------------------------------------------------
# serialization


def _verify_idents(lib: Library) -> None:
    def need_theory(i: Ident) -> None:
        if lib.find_theory(i) is None:
            raise DanglingIdent(f"theory {i}")

    def need_const(i: Ident) -> None:
        if lib.find_decl(i) is None:
            raise DanglingIdent(str(i))

    def need_terms(*terms: Optional[Term]) -> None:
        for t in terms:
            if t is None:
                continue
            for c in constants_of(t):
                need_const(c)

    for th in lib.theories:
        if th.meta_theory is not None:
            need_theory(th.meta_theory)
        for inc in th.includes:
            need_theory(inc)
        for d in th.decls:
            # origin is provenance, not a reference: it may name a pattern
            # instance that elaboration replaced with generated decls
            need_terms(d.tp, d.definiens)
            match d.proof:
                case ProofTerm(t):
                    need_terms(t)
                case DependsOn(ids):
                    for i in ids:
                        if lib.find_decl(i) is None and lib.find_morphism(i) is None:
                            raise DanglingIdent(str(i))
                case _:
                    pass
    for m in lib.morphisms:
        need_theory(m.source)
        need_theory(m.target)
        for c, t in m.assignments:
            need_const(c)
            need_terms(t)


def _term_lines(t: Term, ind: int, lines: list[str], hints: tuple[str, ...]) -> None:
    sp = "  " * ind
    match t:
        case Const(c):
            lines.append(f'{sp}<OMS name="{_a(str(c))}"/>')
        case Var(i):
            if i < len(hints):
                lines.append(f'{sp}<OMV index="{i}" hint="{_a(hints[-1 - i])}"/>')
            else:
                lines.append(f'{sp}<OMV index="{i}"/>')
        case Apply():
            spine: list[Term] = []
            head: Term = t
            while isinstance(head, Apply):
                spine.append(head.arg)
                head = head.fn
            spine.append(head)
            spine.reverse()
            lines.append(f"{sp}<OMA>")
            for part in spine:
                _term_lines(part, ind + 1, lines, hints)
            lines.append(f"{sp}</OMA>")
        case Lambda(h, dom, body):
            lines.append(f'{sp}<OMBIND binder="lambda" var="{_a(h)}">')
            _term_lines(dom, ind + 1, lines, hints)
            _term_lines(body, ind + 1, lines, hints + (h,))
            lines.append(f"{sp}</OMBIND>")
        case Pi(h, dom, cod):
            lines.append(f'{sp}<OMBIND binder="pi" var="{_a(h)}">')
            _term_lines(dom, ind + 1, lines, hints)
            _term_lines(cod, ind + 1, lines, hints + (h,))
            lines.append(f"{sp}</OMBIND>")
        case TypeKind():
            lines.append(f'{sp}<OMBIND binder="type"/>')
        case SubType(base, pred):
            lines.append(f'{sp}<OMBIND binder="sub">')
            _term_lines(base, ind + 1, lines, hints)
            _term_lines(pred, ind + 1, lines, hints)
            lines.append(f"{sp}</OMBIND>")
        case SubIn(elem, witness):
            lines.append(f'{sp}<OMBIND binder="subin">')
            _term_lines(elem, ind + 1, lines, hints)
            _term_lines(witness, ind + 1, lines, hints)
            lines.append(f"{sp}</OMBIND>")
        case SubOut(elem):
            lines.append(f'{sp}<OMBIND binder="subout">')
            _term_lines(elem, ind + 1, lines, hints)
            lines.append(f"{sp}</OMBIND>")
        case _:
            raise AssertionError(f"unserializable term {t!r}")


def _metadata_lines(meta: Metadata, ind: int, lines: list[str]) -> None:
    has_body = meta.source_ref or meta.comments or meta.notation is not None
    if not has_body and meta.origin is None:
        return
    sp = "  " * ind
    origin = f' origin="{_a(str(meta.origin))}"' if meta.origin is not None else ""
    if not has_body:
        lines.append(f"{sp}<metadata{origin}/>")
        return
    lines.append(f"{sp}<metadata{origin}>")
    sp2 = "  " * (ind + 1)
    if meta.source_ref is not None:
        r = meta.source_ref
        lines.append(
            f'{sp2}<srcref file="{_a(r.file)}" sl="{r.start_line}" sc="{r.start_col}"'
            f' el="{r.end_line}" ec="{r.end_col}"/>'
        )
    for c in meta.comments:
        lines.append(f"{sp2}<comment/>" if c == "" else f"{sp2}<comment>{_t(c)}</comment>")
    if meta.notation is not None:
        n = meta.notation
        lines.append(
            f"{sp2}<notation/>" if n == "" else f"{sp2}<notation>{_t(n)}</notation>"
        )
    lines.append(f"{sp}</metadata>")


def _decl_lines(d: Declaration, ind: int, lines: list[str]) -> None:
    sp = "  " * ind
    lines.append(f'{sp}<constant name="{_a(d.name.name)}" kind="{d.meta.kind}">')
    sp2 = "  " * (ind + 1)
    if d.tp is not None:
        lines.append(f"{sp2}<type>")
        _term_lines(d.tp, ind + 2, lines, ())
        lines.append(f"{sp2}</type>")
    if d.definiens is not None:
        lines.append(f"{sp2}<definition>")
        _term_lines(d.definiens, ind + 2, lines, ())
        lines.append(f"{sp2}</definition>")
    match d.proof:
        case Omitted():
            lines.append(f'{sp2}<proof style="omitted"/>')
        case DependsOn(ids):
            if ids:
                lines.append(f'{sp2}<proof style="dependsOn">')
                for i in ids:
                    lines.append(f'{"  " * (ind + 2)}<ref name="{_a(str(i))}"/>')
                lines.append(f"{sp2}</proof>")
            else:
                lines.append(f'{sp2}<proof style="dependsOn"/>')
        case ProofTerm(t):
            lines.append(f'{sp2}<proof style="term">')
            _term_lines(t, ind + 2, lines, ())
            lines.append(f"{sp2}</proof>")
        case _:
            pass
    _metadata_lines(d.meta, ind + 1, lines)
    lines.append(f"{sp}</constant>")


def _theory_lines(th: Theory, ind: int, lines: list[str]) -> None:
    sp = "  " * ind
    meta = f' meta="{_a(str(th.meta_theory))}"' if th.meta_theory is not None else ""
    head = f'{sp}<theory name="{_a(th.name.name)}"{meta}'
    if not th.includes and not th.decls:
        lines.append(head + "/>")
        return
    lines.append(head + ">")
    sp2 = "  " * (ind + 1)
    for inc in th.includes:
        lines.append(f'{sp2}<include from="{_a(str(inc))}"/>')
    for d in th.decls:
        _decl_lines(d, ind + 1, lines)
    lines.append(f"{sp}</theory>")


def _morphism_lines(m: Morphism, ind: int, lines: list[str]) -> None:
    sp = "  " * ind
    head = (
        f'{sp}<morphism name="{_a(str(m.name))}" from="{_a(str(m.source))}"'
        f' to="{_a(str(m.target))}"'
    )
    if not m.assignments:
        lines.append(head + "/>")
        return
    lines.append(head + ">")
    sp2 = "  " * (ind + 1)
    for c, t in m.assignments:
        lines.append(f'{sp2}<assignment name="{_a(str(c))}">')
        _term_lines(t, ind + 2, lines, ())
        lines.append(f"{sp2}</assignment>")
    lines.append(f"{sp}</morphism>")


def serialize(lib: Library) -> bytes:
    """Render the library; raises DanglingIdent when any referenced
    identifier fails to resolve in the library or its dependencies."""
    _verify_idents(lib)
    attrs = f'version="{OMDOC_VERSION}" namespace="{_a(lib.namespace)}"'
    lines: list[str] = []
    if not lib.theories and not lib.morphisms:
        lines.append(f"<omdoc {attrs}/>")
    else:
        lines.append(f"<omdoc {attrs}>")
        for th in lib.theories:
            _theory_lines(th, 1, lines)
        for m in lib.morphisms:
            _morphism_lines(m, 1, lines)
        lines.append("</omdoc>")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# parsing


def _fail(path: str, message: str = "") -> SchemaViolation:
    return SchemaViolation(path, message)


def _attrs(elem: ET.Element, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    for key in elem.attrib:
        if key not in required and key not in optional:
            raise _fail(f"{path}.{key}", "unknown attribute")
    out = {}
    for key in required:
        if key not in elem.attrib:
            raise _fail(f"{path}.{key}", "missing attribute")
        out[key] = elem.attrib[key]
    for key in optional:
        if key in elem.attrib:
            out[key] = elem.attrib[key]
    return out


def _no_text(elem: ET.Element, path: str) -> None:
    if elem.text is not None and elem.text.strip():
        raise _fail(path, "unexpected text content")
    for kid in elem:
        if kid.tail is not None and kid.tail.strip():
            raise _fail(path, "unexpected text content")


def _ident(text: str, path: str) -> Ident:
    try:
        return Ident.parse(text)
    except ValueError as err:
        raise _fail(path, str(err)) from None


def _int_attr(value: str, path: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise _fail(path, "expected an integer") from None


def _parse_term(elem: ET.Element, path: str) -> Term:
    tag = elem.tag
    kids = list(elem)
    if tag == "OMS":
        a = _attrs(elem, path, ("name",))
        _no_text(elem, path)
        if kids:
            raise _fail(path, "OMS takes no children")
        return Const(_ident(a["name"], f"{path}.name"))
    if tag == "OMV":
        a = _attrs(elem, path, ("index",), ("hint",))
        _no_text(elem, path)
        if kids:
            raise _fail(path, "OMV takes no children")
        index = _int_attr(a["index"], f"{path}.index")
        if index < 0:
            raise _fail(f"{path}.index", "negative index")
        return Var(index)
    if tag == "OMA":
        _attrs(elem, path, ())
        _no_text(elem, path)
        if len(kids) < 2:
            raise _fail(path, "OMA needs a head and at least one argument")
        parts = [
            _parse_term(k, f"{path}.{k.tag}[{i}]") for i, k in enumerate(kids)
        ]
        t = parts[0]
        for arg in parts[1:]:
            t = Apply(t, arg)
        return t
    if tag == "OMBIND":
        a = _attrs(elem, path, ("binder",), ("var",))
        _no_text(elem, path)
        binder = a["binder"]
        parts = [_parse_term(k, f"{path}.{k.tag}[{i}]") for i, k in enumerate(kids)]

        def arity(n: int) -> None:
            if len(parts) != n:
                raise _fail(path, f"binder {binder} takes {n} children")

        if binder in ("lambda", "pi"):
            arity(2)
            var = a.get("var", "_")
            cls = Lambda if binder == "lambda" else Pi
            return cls(var, parts[0], parts[1])
        if "var" in a:
            raise _fail(f"{path}.var", f"binder {binder} takes no variable")
        if binder == "type":
            arity(0)
            return TypeKind()
        if binder == "sub":
            arity(2)
            return SubType(parts[0], parts[1])
        if binder == "subin":
            arity(2)
            return SubIn(parts[0], parts[1])
        if binder == "subout":
            arity(1)
            return SubOut(parts[0])
        raise _fail(f"{path}.binder", f"unknown binder {binder!r}")
    raise _fail(path, f"unknown element <{tag}>")


def _one_term_child(elem: ET.Element, path: str) -> Term:
    kids = list(elem)
    if len(kids) != 1:
        raise _fail(path, "expected exactly one term")
    return _parse_term(kids[0], f"{path}.{kids[0].tag}")


def _parse_metadata(elem: ET.Element, path: str):
    a = _attrs(elem, path, (), ("origin",))
    origin = _ident(a["origin"], f"{path}.origin") if "origin" in a else None
    source_ref = None
    comments: list[str] = []
    notation = None
    for i, kid in enumerate(elem):
        kpath = f"{path}.{kid.tag}[{i}]"
        if kid.tag == "srcref":
            if source_ref is not None:
                raise _fail(kpath, "duplicate srcref")
            ka = _attrs(kid, kpath, ("file", "sl", "sc", "el", "ec"))
            if list(kid):
                raise _fail(kpath, "srcref takes no children")
            try:
                source_ref = SourceRef(
                    ka["file"],
                    _int_attr(ka["sl"], f"{kpath}.sl"),
                    _int_attr(ka["sc"], f"{kpath}.sc"),
                    _int_attr(ka["el"], f"{kpath}.el"),
                    _int_attr(ka["ec"], f"{kpath}.ec"),
                )
            except ValueError as err:
                raise _fail(kpath, str(err)) from None
        elif kid.tag == "comment":
            _attrs(kid, kpath, ())
            if list(kid):
                raise _fail(kpath, "comment takes no children")
            comments.append(kid.text or "")
        elif kid.tag == "notation":
            if notation is not None:
                raise _fail(kpath, "duplicate notation")
            _attrs(kid, kpath, ())
            if list(kid):
                raise _fail(kpath, "notation takes no children")
            notation = kid.text or ""
        else:
            raise _fail(kpath, f"unknown element <{kid.tag}>")
    return origin, source_ref, tuple(comments), notation


def _parse_proof(elem: ET.Element, path: str) -> Proof:
    a = _attrs(elem, path, ("style",))
    _no_text(elem, path)
    style = a["style"]
    kids = list(elem)
    if style == "omitted":
        if kids:
            raise _fail(path, "omitted proof takes no children")
        return Omitted()
    if style == "dependsOn":
        ids = []
        for i, kid in enumerate(kids):
            kpath = f"{path}.{kid.tag}[{i}]"
            if kid.tag != "ref":
                raise _fail(kpath, f"unknown element <{kid.tag}>")
            ka = _attrs(kid, kpath, ("name",))
            if list(kid):
                raise _fail(kpath, "ref takes no children")
            ids.append(_ident(ka["name"], f"{kpath}.name"))
        try:
            return DependsOn(tuple(ids))
        except ValueError as err:
            raise _fail(path, str(err)) from None
    if style == "term":
        return ProofTerm(_one_term_child(elem, path))
    raise _fail(f"{path}.style", f"unknown proof style {style!r}")


def _parse_constant(elem: ET.Element, path: str, namespace: str, module: str) -> Declaration:
    a = _attrs(elem, path, ("name", "kind"))
    _no_text(elem, path)
    if a["kind"] not in KINDS:
        raise _fail(f"{path}.kind", f"unknown kind {a['kind']!r}")
    tp = definiens = proof = None
    origin = source_ref = notation = None
    comments: tuple[str, ...] = ()
    seen = set()
    for kid in elem:
        kpath = f"{path}.{kid.tag}"
        if kid.tag in seen:
            raise _fail(kpath, f"duplicate <{kid.tag}>")
        seen.add(kid.tag)
        if kid.tag == "type":
            _attrs(kid, kpath, ())
            _no_text(kid, kpath)
            tp = _one_term_child(kid, kpath)
        elif kid.tag == "definition":
            _attrs(kid, kpath, ())
            _no_text(kid, kpath)
            definiens = _one_term_child(kid, kpath)
        elif kid.tag == "proof":
            proof = _parse_proof(kid, kpath)
        elif kid.tag == "metadata":
            _no_text(kid, kpath)
            origin, source_ref, comments, notation = _parse_metadata(kid, kpath)
        else:
            raise _fail(kpath, f"unknown element <{kid.tag}>")
    try:
        name = Ident(namespace, module, a["name"])
        meta = Metadata(
            kind=a["kind"],
            source_ref=source_ref,
            comments=comments,
            notation=notation,
            origin=origin,
        )
        return Declaration(name, tp=tp, definiens=definiens, proof=proof, meta=meta)
    except ValueError as err:
        raise _fail(path, str(err)) from None


def _parse_theory(elem: ET.Element, path: str, namespace: str) -> Theory:
    a = _attrs(elem, path, ("name",), ("meta",))
    _no_text(elem, path)
    meta_theory = _ident(a["meta"], f"{path}.meta") if "meta" in a else None
    includes = []
    decls = []
    for i, kid in enumerate(elem):
        kpath = f"{path}.{kid.tag}[{i}]"
        if kid.tag == "include":
            if decls:
                raise _fail(kpath, "includes must precede constants")
            ka = _attrs(kid, kpath, ("from",))
            if list(kid):
                raise _fail(kpath, "include takes no children")
            includes.append(_ident(ka["from"], f"{kpath}.from"))
        elif kid.tag == "constant":
            decls.append(_parse_constant(kid, kpath, namespace, a["name"]))
        else:
            raise _fail(kpath, f"unknown element <{kid.tag}>")
    try:
        return Theory(
            theory_ident(namespace, a["name"]),
            meta_theory=meta_theory,
            includes=tuple(includes),
            decls=tuple(decls),
        )
    except ValueError as err:
        raise _fail(path, str(err)) from None


def _parse_morphism(elem: ET.Element, path: str) -> Morphism:
    a = _attrs(elem, path, ("name", "from", "to"))
    _no_text(elem, path)
    assignments = []
    for i, kid in enumerate(elem):
        kpath = f"{path}.{kid.tag}[{i}]"
        if kid.tag != "assignment":
            raise _fail(kpath, f"unknown element <{kid.tag}>")
        ka = _attrs(kid, kpath, ("name",))
        _no_text(kid, kpath)
        assignments.append(
            (_ident(ka["name"], f"{kpath}.name"), _one_term_child(kid, kpath))
        )
    try:
        return Morphism(
            _ident(a["name"], f"{path}.name"),
            _ident(a["from"], f"{path}.from"),
            _ident(a["to"], f"{path}.to"),
            tuple(assignments),
        )
    except ValueError as err:
        raise _fail(path, str(err)) from None


def parse(data: bytes, deps: Optional[tuple[Library, ...]] = None) -> Library:
    """Inverse of serialize, strict about the vocabulary.

    `deps` supplies the support libraries attached to the result so its
    references resolve for later checking or re-serialization; by
    default the bundled logic encodings.
    """
    from .encodings import logic_library

    try:
        root = ET.fromstring(data.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise Malformed(str(err)) from err
    except ET.ParseError as err:
        line = err.position[0] if err.position else None
        raise Malformed(str(err), line) from err
    if root.tag != "omdoc":
        raise _fail(root.tag, "root element must be <omdoc>")
    a = _attrs(root, "omdoc", ("version", "namespace"))
    _no_text(root, "omdoc")
    if a["version"] != OMDOC_VERSION:
        raise UnsupportedVersion(a["version"])
    namespace = a["namespace"]
    theories = []
    morphisms = []
    for i, kid in enumerate(root):
        kpath = f"omdoc.{kid.tag}[{i}]"
        if kid.tag == "theory":
            if morphisms:
                raise _fail(kpath, "theories must precede morphisms")
            theories.append(_parse_theory(kid, kpath, namespace))
        elif kid.tag == "morphism":
            morphisms.append(_parse_morphism(kid, kpath))
        else:
            raise _fail(kpath, f"unknown element <{kid.tag}>")
    lib_deps = deps if deps is not None else (logic_library(),)
    try:
        return Library(namespace, tuple(theories), tuple(morphisms), deps=lib_deps)
    except ValueError as err:
        raise _fail("omdoc", str(err)) from None
