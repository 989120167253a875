"""The logical-framework kernel.

Terms form a dependently typed lambda calculus with one kind (`type`)
plus predicate subtypes. Bound variables are de Bruijn indices, so
alpha-equivalent terms are structurally identical; binder name hints are
carried for printing only and never participate in equality.

The operational core is substitution, weak head normalization (beta,
definiens unfolding, and the subtype computation rule), definitional
equality (beta-delta-eta with witness-irrelevant SubIn), and a
bidirectional checker. Theories bundle declarations; libraries bundle
theories and morphisms and may register dependency libraries for
cross-library resolution.

All values here are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .errors import (
    CheckError,
    Cycle,
    Mismatch,
    NotAFunction,
    NotTyped,
    ReductionDepthExceeded,
    SubtypeWitnessMissing,
    UnknownIdent,
)

# ---------------------------------------------------------------------------
# identifiers


@dataclass(frozen=True)
class Ident:
    """Fully qualified name: namespace, module, local name.

    Rendered as ``namespace?module?name``; no component may be empty or
    contain the separator.
    """

    namespace: str
    module: str
    name: str

    def __post_init__(self) -> None:
        for part in (self.namespace, self.module, self.name):
            if not part:
                raise ValueError("identifier components must be nonempty")
            if "?" in part:
                raise ValueError(f"identifier component contains '?': {part!r}")

    def __str__(self) -> str:
        return f"{self.namespace}?{self.module}?{self.name}"

    @classmethod
    def parse(cls, text: str) -> "Ident":
        parts = text.split("?")
        if len(parts) != 3:
            raise ValueError(f"not an identifier: {text!r}")
        return cls(*parts)


def theory_ident(namespace: str, name: str) -> Ident:
    """Identifier of a theory: module and local name coincide."""
    return Ident(namespace, name, name)


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Term:
    """Base class for framework terms."""


@dataclass(frozen=True)
class Const(Term):
    ident: Ident


@dataclass(frozen=True)
class Var(Term):
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("de Bruijn index must be nonnegative")


@dataclass(frozen=True)
class Apply(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lambda(Term):
    hint: str = field(compare=False)
    dom: Term = field()
    body: Term = field()


@dataclass(frozen=True)
class Pi(Term):
    hint: str = field(compare=False)
    dom: Term = field()
    cod: Term = field()


@dataclass(frozen=True)
class TypeKind(Term):
    """The kind `type`. It classifies types and has itself no type."""


@dataclass(frozen=True)
class SubType(Term):
    """Predicate subtype: elements of `base` satisfying `pred`."""

    base: Term
    pred: Term


@dataclass(frozen=True)
class SubIn(Term):
    """Introduce into a subtype: an element paired with a witness."""

    elem: Term
    witness: Term


@dataclass(frozen=True)
class SubOut(Term):
    """Project the underlying element out of a subtype."""

    elem: Term


def apps(fn: Term, *args: Term) -> Term:
    """Left-nested application spine."""
    for a in args:
        fn = Apply(fn, a)
    return fn


def fn_type(dom: Term, cod: Term) -> Pi:
    """Non-dependent function type: `cod` is shifted under the new binder."""
    return Pi("_", dom, shift(cod, 1))


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class Binding:
    hint: str
    tp: Term


@dataclass(frozen=True)
class Context:
    """Typing context; the innermost binder is the last entry."""

    entries: tuple[Binding, ...] = ()

    def extend(self, hint: str, tp: Term) -> "Context":
        return Context(self.entries + (Binding(hint, tp),))

    def lookup(self, index: int) -> Binding:
        if 0 <= index < len(self.entries):
            return self.entries[len(self.entries) - 1 - index]
        raise NotTyped(f"unbound variable index {index}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Binding]:
        return iter(self.entries)


# ---------------------------------------------------------------------------
# proofs, metadata, declarations


@dataclass(frozen=True)
class Omitted:
    """No proof was exported."""


@dataclass(frozen=True)
class DependsOn:
    """Dependency-only proof: the statements this one relies on."""

    ids: tuple[Ident, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ids", tuple(self.ids))
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("dependency list contains duplicates")


@dataclass(frozen=True)
class ProofTerm:
    term: Term


Proof = Union[Omitted, DependsOn, ProofTerm]


@dataclass(frozen=True)
class SourceRef:
    """1-based physical location of a declaration in its source file."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        pos = (self.start_line, self.start_col, self.end_line, self.end_col)
        if any(p < 1 for p in pos):
            raise ValueError("source positions are 1-based")
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError("source range end precedes start")


KINDS = ("type", "constant", "definition", "axiom", "theorem", "patternInstance")


@dataclass(frozen=True)
class Metadata:
    """Non-logical attributes of a declaration.

    `origin` points back to the pattern instance (or schema) a generated
    declaration came from.
    """

    kind: str
    source_ref: Optional[SourceRef] = None
    comments: tuple[str, ...] = ()
    notation: Optional[str] = None
    origin: Optional[Ident] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown declaration kind {self.kind!r}")
        object.__setattr__(self, "comments", tuple(self.comments))


@dataclass(frozen=True)
class Declaration:
    """A named constant with an optional type, definiens, and proof."""

    name: Ident
    tp: Optional[Term] = None
    definiens: Optional[Term] = None
    proof: Optional[Proof] = None
    meta: Metadata = field(kw_only=True)

    def __post_init__(self) -> None:
        if self.tp is None and self.definiens is None:
            raise ValueError(f"{self.name}: needs a type or a definiens")
        kind = self.meta.kind
        if kind == "theorem" and self.proof is None:
            raise ValueError(f"{self.name}: a theorem carries a proof")
        if self.proof is not None:
            if kind == "axiom" and not isinstance(self.proof, Omitted):
                raise ValueError(f"{self.name}: an axiom may only omit its proof")
            if kind not in ("axiom", "theorem"):
                raise ValueError(f"{self.name}: kind {kind!r} carries no proof")


@dataclass(frozen=True)
class Theory:
    name: Ident
    meta_theory: Optional[Ident] = None
    includes: tuple[Ident, ...] = ()
    decls: tuple[Declaration, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "includes", tuple(self.includes))
        object.__setattr__(self, "decls", tuple(self.decls))


@dataclass(frozen=True)
class Library:
    """A namespace of theories and morphisms.

    `deps` registers supporting libraries (typically the logic encodings)
    for identifier resolution; it is not part of the library's value and
    is excluded from equality.
    """

    namespace: str
    theories: tuple[Theory, ...] = ()
    morphisms: tuple = ()  # Morphism values; the type lives in morphisms.py
    deps: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "theories", tuple(self.theories))
        object.__setattr__(self, "morphisms", tuple(self.morphisms))
        object.__setattr__(self, "deps", tuple(self.deps))

    def libraries(self) -> Iterator["Library"]:
        """This library and its registered dependencies, cycle-safe."""
        seen: set[int] = set()
        stack: list[Library] = [self]
        while stack:
            lib = stack.pop()
            if id(lib) in seen:
                continue
            seen.add(id(lib))
            yield lib
            stack.extend(lib.deps)

    def find_theory(self, ident: Ident) -> Optional[Theory]:
        for lib in self.libraries():
            if lib.namespace != ident.namespace:
                continue
            for th in lib.theories:
                if th.name == ident:
                    return th
        return None

    def find_decl(self, ident: Ident) -> Optional[Declaration]:
        th = self.find_theory(theory_ident(ident.namespace, ident.module))
        if th is None:
            return None
        for d in th.decls:
            if d.name == ident:
                return d
        return None

    def find_morphism(self, ident: Ident):
        for lib in self.libraries():
            for m in lib.morphisms:
                if m.name == ident:
                    return m
        return None


@dataclass(frozen=True)
class Config:
    """Tunable behavior shared by the whole pipeline."""

    eta_enabled: bool = True
    include_proof_uses: bool = False
    reduction_budget: int = 100000
    source_dir: Optional[str] = None


DEFAULT_CONFIG = Config()


# ---------------------------------------------------------------------------
# substitution


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add `by` to every free index at or above `cutoff`."""
    match t:
        case Var(k):
            return Var(k + by) if k >= cutoff else t
        case Apply(f, a):
            return Apply(shift(f, by, cutoff), shift(a, by, cutoff))
        case Lambda(h, d, b):
            return Lambda(h, shift(d, by, cutoff), shift(b, by, cutoff + 1))
        case Pi(h, d, c):
            return Pi(h, shift(d, by, cutoff), shift(c, by, cutoff + 1))
        case SubType(b, p):
            return SubType(shift(b, by, cutoff), shift(p, by, cutoff))
        case SubIn(e, w):
            return SubIn(shift(e, by, cutoff), shift(w, by, cutoff))
        case SubOut(e):
            return SubOut(shift(e, by, cutoff))
        case _:
            return t


def substitute(t: Term, depth: int, s: Term) -> Term:
    """Replace Var(depth) by `s` in `t`.

    Free indices above `depth` decrement (the binder at `depth` is
    consumed); `s` is shifted as it moves under binders. This is exactly
    the beta contraction when called with depth 0 on a redex body.
    """
    match t:
        case Var(k):
            if k == depth:
                return s
            return Var(k - 1) if k > depth else t
        case Apply(f, a):
            return Apply(substitute(f, depth, s), substitute(a, depth, s))
        case Lambda(h, d, b):
            return Lambda(h, substitute(d, depth, s), substitute(b, depth + 1, shift(s, 1)))
        case Pi(h, d, c):
            return Pi(h, substitute(d, depth, s), substitute(c, depth + 1, shift(s, 1)))
        case SubType(b, p):
            return SubType(substitute(b, depth, s), substitute(p, depth, s))
        case SubIn(e, w):
            return SubIn(substitute(e, depth, s), substitute(w, depth, s))
        case SubOut(e):
            return SubOut(substitute(e, depth, s))
        case _:
            return t


def map_consts(t: Term, fn) -> Term:
    """Rebuild `t`, replacing Const(c) by fn(c) wherever fn(c) is not None.

    Replacement terms must be closed; they are spliced in without index
    adjustment.
    """
    match t:
        case Const(c):
            repl = fn(c)
            return t if repl is None else repl
        case Apply(f, a):
            return Apply(map_consts(f, fn), map_consts(a, fn))
        case Lambda(h, d, b):
            return Lambda(h, map_consts(d, fn), map_consts(b, fn))
        case Pi(h, d, b):
            return Pi(h, map_consts(d, fn), map_consts(b, fn))
        case SubType(b, p):
            return SubType(map_consts(b, fn), map_consts(p, fn))
        case SubIn(e, w):
            return SubIn(map_consts(e, fn), map_consts(w, fn))
        case SubOut(e):
            return SubOut(map_consts(e, fn))
        case _:
            return t


def constants_of(t: Term) -> Iterator[Ident]:
    """All constant identifiers in `t`, left to right, with repeats."""
    match t:
        case Const(c):
            yield c
        case Apply(f, a):
            yield from constants_of(f)
            yield from constants_of(a)
        case Lambda(_, d, b) | Pi(_, d, b):
            yield from constants_of(d)
            yield from constants_of(b)
        case SubType(b, p):
            yield from constants_of(b)
            yield from constants_of(p)
        case SubIn(e, w):
            yield from constants_of(e)
            yield from constants_of(w)
        case SubOut(e):
            yield from constants_of(e)


# ---------------------------------------------------------------------------
# reduction and equality

_SUBOUT = object()  # spine marker: the position under a SubOut eliminator


def whnf(lib: Optional[Library], t: Term, config: Optional[Config] = None) -> Term:
    """Weak head normal form.

    Reduces beta redexes, unfolds constants with a definiens, and
    cancels SubOut(SubIn(t, p)) to t, until the head is stuck. Raises
    ReductionDepthExceeded past the configured step budget.
    """
    cfg = config or DEFAULT_CONFIG
    budget = cfg.reduction_budget
    steps = 0
    spine: list = []  # arguments and _SUBOUT markers, innermost last
    head = t
    while True:
        match head:
            case Apply(f, a):
                spine.append(a)
                head = f
                continue
            case SubOut(e):
                spine.append(_SUBOUT)
                head = e
                continue
            case Lambda(_, _, b) | Pi(_, _, b) if spine and spine[-1] is not _SUBOUT:
                # Pi-beta serves toplevel schema instantiation: applying a
                # Pi-closure behaves like applying the matching Lambda
                steps += 1
                if steps > budget:
                    raise ReductionDepthExceeded(f"no head normal form within {budget} steps")
                head = substitute(b, 0, spine.pop())
                continue
            case SubIn(e, _) if spine and spine[-1] is _SUBOUT:
                steps += 1
                if steps > budget:
                    raise ReductionDepthExceeded(f"no head normal form within {budget} steps")
                spine.pop()
                head = e
                continue
            case Const(c) if lib is not None:
                d = lib.find_decl(c)
                if d is not None and d.definiens is not None:
                    steps += 1
                    if steps > budget:
                        raise ReductionDepthExceeded(f"no head normal form within {budget} steps")
                    head = d.definiens
                    continue
        break
    while spine:
        e = spine.pop()
        head = SubOut(head) if e is _SUBOUT else Apply(head, e)
    return head


def equal(
    lib: Optional[Library],
    ctx: Context,
    t1: Term,
    t2: Term,
    config: Optional[Config] = None,
) -> bool:
    """Definitional equality: beta, delta, eta, and witness irrelevance.

    On de Bruijn terms the context carries no information the algorithm
    needs; it is accepted for interface symmetry with infer/check.
    """
    del ctx
    cfg = config or DEFAULT_CONFIG
    return _conv(lib, t1, t2, cfg)


def _conv(lib: Optional[Library], a: Term, b: Term, cfg: Config) -> bool:
    if a == b:  # structural, hint-insensitive
        return True
    a = whnf(lib, a, cfg)
    b = whnf(lib, b, cfg)
    match (a, b):
        case (Lambda(_, d1, b1), Lambda(_, d2, b2)):
            return _conv(lib, d1, d2, cfg) and _conv(lib, b1, b2, cfg)
        case (Pi(_, d1, c1), Pi(_, d2, c2)):
            return _conv(lib, d1, d2, cfg) and _conv(lib, c1, c2, cfg)
        case (SubType(b1, p1), SubType(b2, p2)):
            return _conv(lib, b1, b2, cfg) and _conv(lib, p1, p2, cfg)
        case (SubIn(e1, _), SubIn(e2, _)):
            return _conv(lib, e1, e2, cfg)  # witnesses are irrelevant
        case (SubOut(e1), SubOut(e2)):
            return _conv(lib, e1, e2, cfg)
        case (Var(i), Var(j)):
            return i == j
        case (Const(c1), Const(c2)):
            return c1 == c2
        case (TypeKind(), TypeKind()):
            return True
        case (Apply(f1, a1), Apply(f2, a2)):
            return _conv(lib, f1, f2, cfg) and _conv(lib, a1, a2, cfg)
        case (Lambda(_, _, bd), _) if cfg.eta_enabled:
            return _conv(lib, bd, Apply(shift(b, 1), Var(0)), cfg)
        case (_, Lambda(_, _, bd)) if cfg.eta_enabled:
            return _conv(lib, Apply(shift(a, 1), Var(0)), bd, cfg)
    return False


# ---------------------------------------------------------------------------
# typing


def is_kind(t: Term) -> bool:
    """Syntactic kinds: TypeKind, or a Pi telescope ending in TypeKind."""
    while isinstance(t, Pi):
        t = t.cod
    return isinstance(t, TypeKind)


def infer(
    lib: Optional[Library],
    ctx: Context,
    t: Term,
    config: Optional[Config] = None,
) -> Term:
    """Synthesize the type of `t`.

    Binder domains are not sort-checked here; declaration-level checking
    (check_theory) enforces that declared classifiers are types or kinds.
    """
    cfg = config or DEFAULT_CONFIG
    match t:
        case Var(k):
            return shift(ctx.lookup(k).tp, k + 1)
        case Const(c):
            d = lib.find_decl(c) if lib is not None else None
            if d is None:
                raise UnknownIdent(str(c))
            if d.tp is not None:
                return d.tp
            return infer(lib, Context(), d.definiens, cfg)
        case TypeKind():
            raise NotTyped("the kind 'type' has no type")
        case Apply(f, a):
            ft = whnf(lib, infer(lib, ctx, f, cfg), cfg)
            match ft:
                case Pi(_, dom, cod):
                    check(lib, ctx, a, dom, cfg)
                    return substitute(cod, 0, a)
                case _:
                    raise NotAFunction(f"cannot apply a term of type {format_term(ft)}")
        case Lambda(h, d, b):
            bt = infer(lib, ctx.extend(h, d), b, cfg)
            return Pi(h, d, bt)
        case Pi(h, d, c):
            sort = infer(lib, ctx.extend(h, d), c, cfg)
            if not equal(lib, ctx, sort, TypeKind(), cfg):
                raise Mismatch("Pi codomain is not a type")
            return TypeKind()
        case SubType(b, p):
            if not equal(lib, ctx, infer(lib, ctx, b, cfg), TypeKind(), cfg):
                raise Mismatch("subtype base is not a type")
            check(lib, ctx, p, Pi("x", b, TypeKind()), cfg)
            return TypeKind()
        case SubIn(_, _):
            raise NotTyped("subtype introduction needs an expected subtype")
        case SubOut(e):
            et = whnf(lib, infer(lib, ctx, e, cfg), cfg)
            match et:
                case SubType(base, _):
                    return base
                case _:
                    raise Mismatch(f"SubOut of a non-subtype: {format_term(et)}")
    raise NotTyped(f"cannot infer: {format_term(t)}")


def check(
    lib: Optional[Library],
    ctx: Context,
    t: Term,
    expected: Term,
    config: Optional[Config] = None,
) -> None:
    """Check `t` against `expected` (which must itself classify)."""
    cfg = config or DEFAULT_CONFIG
    exp = whnf(lib, expected, cfg)
    match (t, exp):
        case (Lambda(h, d, b), Pi(_, pd, pc)):
            # annotation and expected domain must agree definitionally
            if not equal(lib, ctx, d, pd, cfg):
                raise Mismatch(
                    f"lambda domain {format_term(d)} vs expected {format_term(pd)}"
                )
            check(lib, ctx.extend(h, pd), b, pc, cfg)
            return
        case (SubIn(e, w), SubType(base, pred)):
            check(lib, ctx, e, base, cfg)
            check(lib, ctx, w, whnf(lib, Apply(pred, e), cfg), cfg)
            return
    actual = infer(lib, ctx, t, cfg)
    if equal(lib, ctx, actual, exp, cfg):
        return
    if isinstance(exp, SubType) and equal(lib, ctx, actual, exp.base, cfg):
        raise SubtypeWitnessMissing(
            f"term of base type {format_term(exp.base)} needs an explicit witness"
        )
    raise Mismatch(f"expected {format_term(exp)}, got {format_term(actual)}")


def check_kind(
    lib: Optional[Library],
    ctx: Context,
    k: Term,
    config: Optional[Config] = None,
) -> None:
    """Validate a kind: a Pi telescope of proper types ending in TypeKind."""
    cfg = config or DEFAULT_CONFIG
    match k:
        case TypeKind():
            return
        case Pi(h, d, c):
            if not equal(lib, ctx, infer(lib, ctx, d, cfg), TypeKind(), cfg):
                raise Mismatch(f"kind domain is not a type: {format_term(d)}")
            check_kind(lib, ctx.extend(h, d), c, cfg)
            return
    raise NotTyped(f"not a kind: {format_term(k)}")


# ---------------------------------------------------------------------------
# theory checking


def flatten(lib: Library, th: Ident) -> list[Declaration]:
    """Depth-first include resolution with diamond deduplication.

    Each reachable theory's declarations appear exactly once, included
    theories in first-visit order, the named theory's own last.
    """
    order: list[Theory] = []
    done: set[Ident] = set()
    path: list[Ident] = []

    def visit(ident: Ident) -> None:
        if ident in done:
            return
        if ident in path:
            chain = " -> ".join(str(i) for i in path + [ident])
            raise Cycle(f"include cycle: {chain}")
        theory = lib.find_theory(ident)
        if theory is None:
            raise UnknownIdent(f"include target {ident} not found")
        path.append(ident)
        for inc in theory.includes:
            visit(inc)
        path.pop()
        done.add(ident)
        order.append(theory)

    visit(th)
    return [d for theory in order for d in theory.decls]


@dataclass(frozen=True)
class CheckResult:
    subject: Ident
    ok: bool
    message: Optional[str] = None


@dataclass(frozen=True)
class CheckReport:
    """Per-declaration outcome of checking one theory or morphism."""

    subject: Ident
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(r for r in self.results if not r.ok)


def _visible_idents(lib: Library, theory: Theory, decls: Iterable[Declaration]) -> set[Ident]:
    visible = {d.name for d in decls}
    seen: set[Ident] = set()
    mt = theory.meta_theory
    while mt is not None and mt not in seen:
        seen.add(mt)
        visible.update(d.name for d in flatten(lib, mt))
        mt_theory = lib.find_theory(mt)
        mt = mt_theory.meta_theory if mt_theory is not None else None
    return visible


def _is_statement(lib: Library, ident: Ident) -> bool:
    d = lib.find_decl(ident)
    if d is not None:
        return d.meta.kind in ("axiom", "theorem", "patternInstance")
    return lib.find_morphism(ident) is not None


def _check_declaration(
    lib: Library, decl: Declaration, visible: set[Ident], cfg: Config
) -> None:
    terms = [t for t in (decl.tp, decl.definiens) if t is not None]
    if isinstance(decl.proof, ProofTerm):
        terms.append(decl.proof.term)
    for term in terms:
        for c in constants_of(term):
            if c not in visible:
                raise UnknownIdent(str(c))
    empty = Context()
    if decl.tp is not None:
        if is_kind(decl.tp):
            check_kind(lib, empty, decl.tp, cfg)
        else:
            sort = infer(lib, empty, decl.tp, cfg)
            if not equal(lib, empty, sort, TypeKind(), cfg):
                raise Mismatch(f"{decl.name}: declared type is not a type")
    if decl.definiens is not None:
        if decl.tp is not None:
            check(lib, empty, decl.definiens, decl.tp, cfg)
        else:
            infer(lib, empty, decl.definiens, cfg)
    match decl.proof:
        case DependsOn(ids):
            # referential validation only; targets may live anywhere in
            # the library (morphism-installed theorems cite the morphism)
            for i in ids:
                if not _is_statement(lib, i):
                    raise UnknownIdent(f"dependency {i} does not resolve to a statement")
        case ProofTerm(pt):
            if decl.tp is None:
                raise NotTyped(f"{decl.name}: proof term without a statement")
            check(lib, empty, pt, decl.tp, cfg)
        case _:
            pass


def check_theory(lib: Library, th: Ident, config: Optional[Config] = None) -> CheckReport:
    """Check every declaration the theory itself makes.

    Included theories are assumed checked separately; a Cycle in the
    include graph is raised, everything else is collected per
    declaration.
    """
    cfg = config or DEFAULT_CONFIG
    theory = lib.find_theory(th)
    if theory is None:
        raise UnknownIdent(f"theory {th} not found")
    results: list[CheckResult] = []
    try:
        decls = flatten(lib, th)
        visible = _visible_idents(lib, theory, decls)
    except Cycle:
        raise
    except CheckError as err:
        return CheckReport(th, (CheckResult(th, False, str(err)),))
    names = [d.name for d in decls]
    if len(set(names)) != len(names):
        seen: set[Ident] = set()
        dup = next(n for n in names if n in seen or seen.add(n))
        results.append(CheckResult(th, False, f"duplicate declaration {dup}"))
    for decl in theory.decls:
        try:
            _check_declaration(lib, decl, visible, cfg)
            results.append(CheckResult(decl.name, True))
        except CheckError as err:
            results.append(CheckResult(decl.name, False, f"{type(err).__name__}: {err}"))
    return CheckReport(th, tuple(results))


def check_library(lib: Library, config: Optional[Config] = None) -> list[CheckReport]:
    return [check_theory(lib, th.name, config) for th in lib.theories]


# ---------------------------------------------------------------------------
# printing


def format_term(t: Term, names: tuple[str, ...] = ()) -> str:
    """Concrete syntax for messages and docs.

    Binders print Twelf-style: `[x : A] b` for lambda, `{x : A} B` for
    Pi, with `A -> B` sugar when the codomain ignores its variable.
    Subtypes print as `<A | P>`, `in(t, p)`, `out(t)`.
    """
    return _fmt(t, list(names), 0)


def _mentions(t: Term, k: int) -> bool:
    match t:
        case Var(i):
            return i == k
        case Apply(f, a):
            return _mentions(f, k) or _mentions(a, k)
        case Lambda(_, d, b) | Pi(_, d, b):
            return _mentions(d, k) or _mentions(b, k + 1)
        case SubType(b, p):
            return _mentions(b, k) or _mentions(p, k)
        case SubIn(e, w):
            return _mentions(e, k) or _mentions(w, k)
        case SubOut(e):
            return _mentions(e, k)
        case _:
            return False


def _bind_name(hint: str, names: list[str]) -> str:
    base = hint if hint and hint != "_" else "x"
    name = base
    n = 0
    while name in names:
        n += 1
        name = f"{base}{n}"
    return name


def _fmt(t: Term, names: list[str], prec: int) -> str:
    # prec 0: binder/arrow position, 1: application head, 2: atom
    match t:
        case Const(c):
            return c.name
        case Var(k):
            if k < len(names):
                return names[len(names) - 1 - k]
            return f"#{k}"
        case TypeKind():
            return "type"
        case Apply(f, a):
            s = f"{_fmt(f, names, 1)} {_fmt(a, names, 2)}"
            return f"({s})" if prec > 1 else s
        case Pi(h, d, c):
            if not _mentions(c, 0):
                body = _fmt(shift(c, -1, 1), names, 0)
                s = f"{_fmt(d, names, 1)} -> {body}"
            else:
                x = _bind_name(h, names)
                s = f"{{{x} : {_fmt(d, names, 0)}}} {_fmt(c, names + [x], 0)}"
            return f"({s})" if prec > 0 else s
        case Lambda(h, d, b):
            x = _bind_name(h, names)
            s = f"[{x} : {_fmt(d, names, 0)}] {_fmt(b, names + [x], 0)}"
            return f"({s})" if prec > 0 else s
        case SubType(b, p):
            return f"<{_fmt(b, names, 0)} | {_fmt(p, names, 0)}>"
        case SubIn(e, w):
            return f"in({_fmt(e, names, 0)}, {_fmt(w, names, 0)})"
        case SubOut(e):
            return f"out({_fmt(e, names, 0)})"
    return repr(t)
