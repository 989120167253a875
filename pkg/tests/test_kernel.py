"""Kernel tests: substitution, reduction, equality, typing, theories.

Derived expectations come from independent oracles: a named-variable
substitutor (tests/named_terms.py) and a single-step head reducer
iterated to fixpoint, both defined apart from the kernel's machinery.
"""

import random

import pytest

import named_terms as nt
from generators import (
    BASE_LIB,
    BASE_THEORY,
    NAT,
    NS,
    O,
    gen_scoped,
    gen_signature,
    gen_term,
    gen_type,
    gen_typed_closed,
    mutate_hints,
)
from proofport.errors import (
    Cycle,
    Mismatch,
    NotAFunction,
    NotTyped,
    ReductionDepthExceeded,
    SubtypeWitnessMissing,
    UnknownIdent,
)
from proofport.kernel import (
    Apply,
    Config,
    Const,
    Context,
    Declaration,
    DependsOn,
    Ident,
    Lambda,
    Library,
    Metadata,
    Omitted,
    Pi,
    SubIn,
    SubOut,
    SubType,
    Term,
    Theory,
    TypeKind,
    Var,
    apps,
    check,
    check_theory,
    equal,
    flatten,
    fn_type,
    format_term,
    infer,
    shift,
    substitute,
    theory_ident,
    whnf,
)

EMPTY = Library("lib://empty")
CTX = Context()


def _i(name: str) -> Ident:
    return Ident(NS, "base", name)


ZERO = Const(_i("zero"))
SUCC = Const(_i("succ"))
TT = Const(_i("tt"))
ONE = Const(_i("one"))
TWICE = Const(_i("twice"))


# ---------------------------------------------------------------------------
# substitution


def test_substitute_identity_redex():
    assert substitute(Var(0), 0, ZERO) == ZERO


def test_substitute_shift_under_binder():
    t = Lambda("x", NAT, Var(1))
    assert substitute(t, 0, ZERO) == Lambda("x", NAT, ZERO)


def _check_against_named_oracle(t: Term, depth: int, s: Term, nfree: int) -> None:
    """Replay the substitution on named terms and compare alpha-equal."""
    env_t = [f"v{k}" for k in range(nfree)]
    env_s = [f"v{k}" if k < depth else f"v{k + 1}" for k in range(max(nfree - 1, 0))]
    fresh = nt.fresh_source()
    expected = nt.substitute(
        nt.from_debruijn(t, env_t, fresh), f"v{depth}", nt.from_debruijn(s, env_s, fresh), fresh
    )
    actual = nt.from_debruijn(substitute(t, depth, s), env_s, fresh)
    assert nt.alpha_equal(expected, actual), f"oracle disagrees for {t} [{depth} := {s}]"


def test_substitute_spec_apply_case_against_oracle():
    # the named-variable oracle fixes the expected final indices
    t = Apply(Var(0), Var(1))
    result = substitute(t, 0, Var(0))
    assert result == Apply(Var(0), Var(0))
    _check_against_named_oracle(t, 0, Var(0), nfree=2)


def test_substitute_matches_named_oracle_on_random_terms():
    rng = random.Random(101)
    for _ in range(200):
        nfree = rng.randint(1, 4)
        depth = rng.randrange(nfree)
        t = gen_scoped(rng, nfree)
        s = gen_scoped(rng, max(nfree - 1, 0))
        _check_against_named_oracle(t, depth, s, nfree)


# ---------------------------------------------------------------------------
# weak head normalization


def head_step(lib, t):
    """Oracle: one leftmost head reduction, or None when head-stuck."""
    match t:
        case Apply(Lambda(_, _, b), a) | Apply(Pi(_, _, b), a):
            return substitute(b, 0, a)
        case Apply(f, a):
            f2 = head_step(lib, f)
            return None if f2 is None else Apply(f2, a)
        case SubOut(SubIn(e, _)):
            return e
        case SubOut(e):
            e2 = head_step(lib, e)
            return None if e2 is None else SubOut(e2)
        case Const(c):
            d = lib.find_decl(c) if lib is not None else None
            if d is not None and d.definiens is not None:
                return d.definiens
            return None
        case _:
            return None


def whnf_fixpoint(lib, t, budget):
    steps = 0
    while True:
        nxt = head_step(lib, t)
        if nxt is None:
            return t
        t = nxt
        steps += 1
        if steps > budget:
            raise ReductionDepthExceeded(str(budget))


def test_whnf_beta_identity():
    assert whnf(EMPTY, Apply(Lambda("x", NAT, Var(0)), ZERO)) == ZERO


def test_whnf_subtype_cancellation():
    assert whnf(EMPTY, SubOut(SubIn(ZERO, TT))) == ZERO


def test_whnf_unfolds_definiens_to_lambda():
    result = whnf(BASE_LIB, TWICE)
    assert isinstance(result, Lambda)
    assert result == BASE_LIB.find_decl(_i("twice")).definiens


def test_whnf_matches_fixpoint_oracle_on_random_signatures():
    rng = random.Random(202)
    cfg = Config(reduction_budget=500)
    for _ in range(100):
        lib = gen_signature(rng)
        consts = tuple(d.name for t in lib.theories for d in t.decls)
        for _ in range(5):
            t = gen_scoped(rng, 0, depth=4, consts=consts)
            try:
                got = whnf(lib, t, cfg)
            except ReductionDepthExceeded:
                with pytest.raises(ReductionDepthExceeded):
                    whnf_fixpoint(lib, t, cfg.reduction_budget)
                continue
            assert got == whnf_fixpoint(lib, t, cfg.reduction_budget)


def test_whnf_budget_exhaustion():
    omega = Lambda("x", NAT, Apply(Var(0), Var(0)))
    with pytest.raises(ReductionDepthExceeded):
        whnf(EMPTY, Apply(omega, omega), Config(reduction_budget=50))


# ---------------------------------------------------------------------------
# definitional equality


def test_equal_reflexive_on_random_terms():
    rng = random.Random(303)
    for _ in range(50):
        t = gen_scoped(rng, 0)
        assert equal(BASE_LIB, CTX, t, t)


def test_equal_eta():
    lam = Lambda("x", NAT, Apply(SUCC, Var(0)))
    assert equal(EMPTY, CTX, lam, SUCC)
    assert not equal(EMPTY, CTX, lam, SUCC, Config(eta_enabled=False))


def test_equal_witness_irrelevance():
    a = SubIn(ZERO, TT)
    b = SubIn(ZERO, Apply(Const(_i("neg")), TT))
    assert equal(EMPTY, CTX, a, b)
    assert not equal(EMPTY, CTX, a, SubIn(ONE, TT))


def test_equal_unfolds_definitions():
    assert equal(BASE_LIB, CTX, ONE, Apply(SUCC, ZERO))
    assert not equal(BASE_LIB, CTX, ONE, ZERO)


def test_equal_ignores_hints():
    a = Lambda("x", NAT, Var(0))
    b = Lambda("completely_else", NAT, Var(0))
    assert a == b
    assert equal(EMPTY, CTX, a, b)


# ---------------------------------------------------------------------------
# inference and checking


def test_infer_lambda_identity():
    some = Ident("lib://x", "m", "b")
    got = infer(EMPTY, CTX, Lambda("x", Const(some), Var(0)))
    assert got == Pi("x", Const(some), Const(some))


def test_infer_var_shifts_context_types():
    # under x : (nat -> nat), y : nat the variable x keeps its type
    ctx = CTX.extend("x", fn_type(NAT, NAT)).extend("y", NAT)
    assert infer(BASE_LIB, ctx, Var(1)) == fn_type(NAT, NAT)
    assert infer(BASE_LIB, ctx, Var(0)) == NAT


def test_infer_const_and_apply():
    assert infer(BASE_LIB, CTX, ZERO) == NAT
    assert infer(BASE_LIB, CTX, apps(Const(_i("plus")), ZERO, ONE)) == NAT


def test_infer_unknown_ident():
    with pytest.raises(UnknownIdent):
        infer(BASE_LIB, CTX, Const(Ident(NS, "base", "missing")))


def test_infer_typekind_has_no_type():
    with pytest.raises(NotTyped):
        infer(BASE_LIB, CTX, TypeKind())


def test_infer_subout():
    sub = SubType(NAT, Lambda("n", NAT, O))
    ctx = CTX.extend("s", sub)
    assert infer(BASE_LIB, ctx, SubOut(Var(0))) == shift(NAT, 1)


def test_check_const_against_declared_type():
    check(BASE_LIB, CTX, ZERO, NAT)


def test_check_not_a_function():
    with pytest.raises(NotAFunction):
        check(BASE_LIB, CTX, Apply(TT, TT), NAT)


def test_check_subtype_introduction():
    sub = SubType(NAT, Lambda("n", NAT, O))
    check(BASE_LIB, CTX, SubIn(ZERO, TT), sub)
    with pytest.raises(Mismatch):
        check(BASE_LIB, CTX, SubIn(TT, TT), sub)


def test_check_witness_missing():
    sub = SubType(NAT, Lambda("n", NAT, O))
    with pytest.raises(SubtypeWitnessMissing):
        check(BASE_LIB, CTX, ZERO, sub)


def test_check_lambda_domain_mismatch():
    with pytest.raises(Mismatch):
        check(BASE_LIB, CTX, Lambda("x", O, Var(0)), fn_type(NAT, NAT))


def test_infer_matches_generator_types():
    rng = random.Random(404)
    for _ in range(150):
        t, tp = gen_typed_closed(rng)
        assert equal(BASE_LIB, CTX, infer(BASE_LIB, CTX, t), tp)
        check(BASE_LIB, CTX, t, tp)


# ---------------------------------------------------------------------------
# kernel invariants


def test_substitution_lemma():
    rng = random.Random(505)
    for _ in range(120):
        a = gen_type(rng)
        b = gen_type(rng)
        t = gen_term(rng, [a], b)
        s = gen_term(rng, [], a)
        # closed simple types ignore the substitution on the type side
        check(BASE_LIB, CTX, substitute(t, 0, s), b)


def test_subject_reduction():
    rng = random.Random(606)
    for _ in range(120):
        t, tp = gen_typed_closed(rng)
        reduced = whnf(BASE_LIB, t)
        assert equal(BASE_LIB, CTX, infer(BASE_LIB, CTX, reduced), tp)


def test_whnf_idempotent():
    rng = random.Random(707)
    cfg = Config(reduction_budget=400)
    for _ in range(150):
        t = gen_scoped(rng, 0)
        try:
            once = whnf(BASE_LIB, t, cfg)
        except ReductionDepthExceeded:
            continue
        assert whnf(BASE_LIB, once, cfg) == once


def test_alpha_invariance_of_hints():
    rng = random.Random(808)
    for _ in range(100):
        t, tp = gen_typed_closed(rng)
        mutated = mutate_hints(rng, t)
        assert mutated == t
        assert equal(BASE_LIB, CTX, mutated, t)
        assert infer(BASE_LIB, CTX, mutated) == infer(BASE_LIB, CTX, t)


def test_equal_is_congruence_under_apply():
    rng = random.Random(909)
    for _ in range(50):
        f = gen_term(rng, [], fn_type(NAT, NAT))
        a = gen_term(rng, [], NAT)
        b = whnf(BASE_LIB, a)
        assert equal(BASE_LIB, CTX, Apply(f, a), Apply(f, b))


def test_refinement_cancellation():
    rng = random.Random(111)
    for _ in range(100):
        t, _tp = gen_typed_closed(rng)
        assert equal(BASE_LIB, CTX, SubOut(SubIn(t, TT)), t)


# ---------------------------------------------------------------------------
# flatten and theory checking


def _tiny_theory(ns, name, includes=(), ntypes=1):
    decls = tuple(
        Declaration(Ident(ns, name, f"c{j}"), tp=TypeKind(), meta=Metadata(kind="type"))
        for j in range(ntypes)
    )
    return Theory(
        theory_ident(ns, name),
        includes=tuple(theory_ident(ns, i) for i in includes),
        decls=decls,
    )


def test_flatten_no_includes():
    assert flatten(BASE_LIB, BASE_THEORY) == list(BASE_LIB.theories[0].decls)


def test_flatten_diamond_dedup():
    ns = "lib://d"
    lib = Library(
        ns,
        (
            _tiny_theory(ns, "a"),
            _tiny_theory(ns, "b", includes=("a",)),
            _tiny_theory(ns, "c", includes=("a",)),
            _tiny_theory(ns, "d", includes=("b", "c")),
        ),
    )
    decls = flatten(lib, theory_ident(ns, "d"))
    modules = [d.name.module for d in decls]
    assert modules == ["a", "b", "c", "d"]


def test_flatten_matches_bfs_oracle():
    rng = random.Random(121)
    from generators import gen_dag_library

    for _ in range(50):
        lib = gen_dag_library(rng)
        root = rng.choice(lib.theories).name
        # oracle: BFS reachability, then each reachable theory's decls once
        reach = set()
        frontier = [root]
        while frontier:
            cur = frontier.pop(0)
            if cur in reach:
                continue
            reach.add(cur)
            frontier.extend(lib.find_theory(cur).includes)
        expected = sorted(
            str(d.name) for th in lib.theories if th.name in reach for d in th.decls
        )
        got = sorted(str(d.name) for d in flatten(lib, root))
        assert got == expected


def test_flatten_cycle():
    ns = "lib://cyc"
    lib = Library(
        ns,
        (
            _tiny_theory(ns, "a", includes=("b",)),
            _tiny_theory(ns, "b", includes=("a",)),
        ),
    )
    with pytest.raises(Cycle):
        flatten(lib, theory_ident(ns, "a"))


def test_check_theory_base_passes():
    report = check_theory(BASE_LIB, BASE_THEORY)
    assert report.ok
    assert len(report.results) == len(BASE_LIB.theories[0].decls)


def test_check_theory_empty():
    lib = Library("lib://e", (Theory(theory_ident("lib://e", "t")),))
    report = check_theory(lib, theory_ident("lib://e", "t"))
    assert report.ok and report.results == ()


def test_check_theory_dangling_dependency():
    ns = "lib://dep"
    axiom = Declaration(
        Ident(ns, "t", "a"), tp=Const(Ident(ns, "t", "p")), meta=Metadata(kind="axiom")
    )
    ptype = Declaration(Ident(ns, "t", "p"), tp=TypeKind(), meta=Metadata(kind="type"))
    good = Declaration(
        Ident(ns, "t", "good"),
        tp=Const(Ident(ns, "t", "p")),
        proof=DependsOn((Ident(ns, "t", "a"),)),
        meta=Metadata(kind="theorem"),
    )
    bad = Declaration(
        Ident(ns, "t", "bad"),
        tp=Const(Ident(ns, "t", "p")),
        proof=DependsOn((Ident(ns, "t", "ghost"),)),
        meta=Metadata(kind="theorem"),
    )
    lib = Library(ns, (Theory(theory_ident(ns, "t"), decls=(ptype, axiom, good, bad)),))
    report = check_theory(lib, theory_ident(ns, "t"))
    by_name = {r.subject.name: r for r in report.results}
    assert by_name["good"].ok
    assert not by_name["bad"].ok
    assert "UnknownIdent" in by_name["bad"].message


def test_declaration_invariants():
    ns = "lib://inv"
    with pytest.raises(ValueError):
        Declaration(Ident(ns, "t", "empty"), meta=Metadata(kind="constant"))
    with pytest.raises(ValueError):
        Declaration(Ident(ns, "t", "thm"), tp=NAT, meta=Metadata(kind="theorem"))
    with pytest.raises(ValueError):
        Declaration(
            Ident(ns, "t", "c"), tp=NAT, proof=Omitted(), meta=Metadata(kind="constant")
        )


def test_ident_validation():
    with pytest.raises(ValueError):
        Ident("", "m", "n")
    with pytest.raises(ValueError):
        Ident("lib://x", "m?d", "n")
    assert str(Ident("lib://x", "m", "n")) == "lib://x?m?n"
    assert Ident.parse("lib://x?m?n") == Ident("lib://x", "m", "n")


def test_format_term_concrete_syntax():
    c = Const(Ident("lib://x", "m", "c"))
    fn = Lambda("f", Pi("x", TypeKind(), TypeKind()), Apply(Var(0), c))
    assert format_term(fn) == "[f : type -> type] f c"
    dependent = Pi("x", TypeKind(), Apply(c, Var(0)))
    assert format_term(dependent) == "{x : type} c x"
    shadowed = Lambda("x", TypeKind(), Lambda("x", TypeKind(), Apply(Var(1), Var(0))))
    assert format_term(shadowed) == "[x : type] [x1 : type] x x1"
    nested = Apply(c, Apply(c, c))
    assert format_term(nested) == "c (c c)"
    sub = SubType(TypeKind(), Lambda("e", TypeKind(), Var(0)))
    assert format_term(SubOut(SubIn(c, sub))) == "out(in(c, <type | [e : type] e>))"
    assert format_term(Var(3)) == "#3"
