//! Property tests for the orders, the interpretation arithmetic and the
//! template language.

use std::collections::BTreeMap;

use proptest::prelude::*;
use termtpl_core::interp::{eval_numeric, linear_form, monotone, orients};
use termtpl_core::orders::{kbo_admissible, kbo_gt, kbo_weight, lpo_gt};
use termtpl_core::template::{
    Atom, CoefLit, ConstLit, Entry, IntersAtom, MatrixLit, Monomial, PrecAtom, PrecRel, WeightRel,
    WeightsAtom, parse_inters, parse_prec, parse_weights, to_dnf,
};
use termtpl_core::{
    InterpKind, Interpretation, Matrix, Orientation, PrecMode, Precedence, Rule, SymId, Symbol,
    SymbolInterp, TemplateAst, Term, Trs, VarId, WeightFn, parse_trs,
};

/// Signature a/0, b/0, f/1, g/2, h/1 over variables x, y, z.
const ARITIES: [usize; 5] = [0, 0, 1, 2, 1];
const NAMES: [&str; 5] = ["a", "b", "f", "g", "h"];

fn signature() -> Trs {
    let symbols = NAMES
        .iter()
        .zip(ARITIES)
        .map(|(n, a)| Symbol {
            name: n.to_string(),
            arity: a,
        })
        .collect();
    Trs::new(symbols, vec!["x".into(), "y".into(), "z".into()], vec![]).unwrap()
}

fn term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..3usize).prop_map(|v| Term::Var(VarId(v))),
        (0..2usize).prop_map(|c| Term::App(SymId(c), vec![])),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::App(SymId(2), vec![t])),
            (inner.clone(), inner.clone()).prop_map(|(s, t)| Term::App(SymId(3), vec![s, t])),
            inner.prop_map(|t| Term::App(SymId(4), vec![t])),
        ]
    })
}

fn precedence() -> impl Strategy<Value = Precedence> {
    (
        prop::collection::vec(0..5u32, 5),
        prop_oneof![Just(PrecMode::Strict), Just(PrecMode::Quasi)],
    )
        .prop_map(|(levels, mode)| Precedence::new(levels, mode))
}

/// Admissible KBO parameters for the fixed signature.
fn kbo_params() -> impl Strategy<Value = (Precedence, WeightFn)> {
    (precedence(), 1..3u64, prop::collection::vec(0..4u64, 5))
        .prop_map(|(p, w0, mut ws)| {
            // constants must weigh at least w0
            for (w, &ar) in ws.iter_mut().zip(ARITIES.iter()) {
                if ar == 0 {
                    *w = (*w).max(w0);
                }
            }
            (p, WeightFn::new(w0, ws).unwrap())
        })
        .prop_filter("admissible", |(p, wf)| kbo_admissible(p, wf, &signature()))
}

fn subst() -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(term(2), 3)
}

fn apply(t: &Term, sigma: &[Term]) -> Term {
    t.substitute(&|x: VarId| sigma[x.0].clone())
}

/// Places `t` into a one-hole context built from `path`.
fn plug(path: &[(usize, Term)], t: Term) -> Term {
    path.iter().fold(t, |acc, (kind, other)| match kind % 3 {
        0 => Term::App(SymId(2), vec![acc]),
        1 => Term::App(SymId(3), vec![other.clone(), acc]),
        _ => Term::App(SymId(3), vec![acc, other.clone()]),
    })
}

fn context() -> impl Strategy<Value = Vec<(usize, Term)>> {
    prop::collection::vec((0..3usize, term(1)), 1..3)
}

fn proper_subterms(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    if let Term::App(_, args) = t {
        for a in args {
            out.push(a.clone());
            out.extend(proper_subterms(a));
        }
    }
    out
}

type Gt = dyn Fn(&Term, &Term) -> bool;

fn lpo(p: &Precedence) -> Box<Gt> {
    let p = p.clone();
    Box::new(move |s, t| lpo_gt(&p, s, t).unwrap())
}

fn kbo(p: &Precedence, wf: &WeightFn) -> Box<Gt> {
    let (p, wf) = (p.clone(), wf.clone());
    Box::new(move |s, t| kbo_gt(&p, &wf, s, t).unwrap())
}

/// Irreflexivity, transitivity, subterm property, closure under
/// substitutions and contexts for one concrete order.
fn check_order_axioms(
    gt: &Gt,
    subterm_property: bool,
    s: &Term,
    t: &Term,
    u: &Term,
    sigma: &[Term],
    ctx: &[(usize, Term)],
) -> Result<(), TestCaseError> {
    prop_assert!(!gt(s, s));
    if subterm_property {
        for sub in proper_subterms(s) {
            prop_assert!(gt(s, &sub));
        }
    }
    if gt(s, t) {
        prop_assert!(!gt(t, s), "asymmetry");
        prop_assert!(gt(&apply(s, sigma), &apply(t, sigma)), "substitution");
        prop_assert!(gt(&plug(ctx, s.clone()), &plug(ctx, t.clone())), "context");
        if gt(t, u) {
            prop_assert!(gt(s, u), "transitivity");
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lpo_is_a_simplification_order(
        p in precedence(),
        s in term(3), t in term(3), u in term(3),
        sigma in subst(), ctx in context(),
    ) {
        check_order_axioms(&*lpo(&p), true, &s, &t, &u, &sigma, &ctx)?;
    }

    #[test]
    fn kbo_is_a_simplification_order(
        (p, wf) in kbo_params(),
        s in term(3), t in term(3), u in term(3),
        sigma in subst(), ctx in context(),
    ) {
        // With a quasi-precedence a weight-0 unary symbol may be equivalent
        // to a symbol of another arity; the order then stays sound but loses
        // the subterm property.
        let strict = p.mode() == PrecMode::Strict;
        check_order_axioms(&*kbo(&p, &wf), strict, &s, &t, &u, &sigma, &ctx)?;
        if kbo_gt(&p, &wf, &s, &t).unwrap() {
            prop_assert!(kbo_weight(&wf, &s).unwrap() >= kbo_weight(&wf, &t).unwrap());
        }
    }

    /// Chains built from subterms exercise transitivity on related terms,
    /// where random triples rarely line up.
    #[test]
    fn orders_are_transitive_on_subterm_chains(
        p in precedence(),
        (kp, wf) in kbo_params(),
        s in term(4), t in term(3), sigma in subst(),
    ) {
        let big = apply(&s, &sigma);
        let mut chain = vec![big.clone(), t.clone()];
        chain.extend(proper_subterms(&big));
        chain.extend(proper_subterms(&t));
        for (name, gt) in [("lpo", lpo(&p)), ("kbo", kbo(&kp, &wf))] {
            for a in &chain {
                for b in &chain {
                    if !gt(a, b) {
                        continue;
                    }
                    for c in &chain {
                        if gt(b, c) {
                            prop_assert!(gt(a, c), "{} not transitive: {:?} > {:?} > {:?}", name, a, b, c);
                        }
                    }
                }
            }
        }
    }
}

/// Independent evaluation of a term under a matrix interpretation.
fn eval_direct(i: &Interpretation, t: &Term, env: &[Vec<u64>]) -> Vec<u64> {
    match t {
        Term::Var(x) => env[x.0].clone(),
        Term::App(f, args) => {
            let fi = &i.funs()[f.0];
            let mut acc = fi.constant.clone();
            for (m, a) in fi.coeffs.iter().zip(args) {
                let v = eval_direct(i, a, env);
                for (r, slot) in acc.iter_mut().enumerate() {
                    *slot += (0..v.len()).map(|c| m.get(r, c) * v[c]).sum::<u64>();
                }
            }
            acc
        }
    }
}

fn interpretation(dim: usize) -> impl Strategy<Value = Interpretation> {
    let entries: usize = ARITIES.iter().map(|a| a * dim * dim + dim).sum();
    prop::collection::vec(0..4u64, entries).prop_map(move |v| {
        let mut it = v.into_iter();
        let funs = ARITIES
            .iter()
            .map(|&ar| {
                let coeffs = (0..ar)
                    .map(|_| {
                        let rows: Vec<Vec<u64>> = (0..dim)
                            .map(|_| (0..dim).map(|_| it.next().unwrap()).collect())
                            .collect();
                        Matrix::from_rows(&rows).unwrap()
                    })
                    .collect();
                let constant = (0..dim).map(|_| it.next().unwrap()).collect();
                SymbolInterp { coeffs, constant }
            })
            .collect();
        if dim == 1 {
            Interpretation::poly(funs).unwrap()
        } else {
            Interpretation::matrix(dim, funs).unwrap()
        }
    })
}

/// All assignments of vectors over {0..3}^dim to the variables x, y, z.
fn grid(dim: usize) -> Vec<Vec<Vec<u64>>> {
    let per_var: Vec<Vec<u64>> = (0..4u64.pow(dim as u32))
        .map(|mut n| {
            (0..dim)
                .map(|_| {
                    let d = n % 4;
                    n /= 4;
                    d
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for x in &per_var {
        for y in &per_var {
            for z in &per_var {
                out.push(vec![x.clone(), y.clone(), z.clone()]);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn linear_form_matches_direct_evaluation(
        i in (1..4usize).prop_flat_map(interpretation),
        t in term(4),
        seed in any::<u64>(),
    ) {
        let dim = i.dim();
        let form = linear_form(&i, &t).unwrap();
        let env: Vec<Vec<u64>> = (0..3)
            .map(|v| (0..dim).map(|k| (seed >> (8 * v + 2 * k)) % 5).collect())
            .collect();
        let assignment: BTreeMap<VarId, Vec<u64>> = t
            .vars()
            .into_iter()
            .map(|x| (x, env[x.0].clone()))
            .collect();
        prop_assert_eq!(eval_numeric(&form, &assignment).unwrap(), eval_direct(&i, &t, &env));
    }

    /// A strictly oriented rule decreases in the first component on every
    /// point of the {0..3}^dim grid.
    #[test]
    fn strict_orientation_decreases_on_the_grid(
        i in interpretation(2),
        l in term(3),
        r in term(2),
    ) {
        prop_assume!(!l.is_var());
        prop_assume!(r.vars().iter().all(|x| l.contains_var(*x)));
        let rule = Rule { lhs: l, rhs: r };
        if orients(&i, &rule).unwrap() == Orientation::Strict {
            for env in grid(2) {
                let lv = eval_direct(&i, &rule.lhs, &env);
                let rv = eval_direct(&i, &rule.rhs, &env);
                prop_assert!(lv[0] > rv[0]);
                prop_assert!(lv[1] >= rv[1]);
            }
        }
    }

    /// Monotone interpretations are strictly monotone in the first
    /// component of every argument position.
    #[test]
    fn monotone_interpretations_are_monotone(
        i in interpretation(2),
        t in term(3),
        env in prop::collection::vec(prop::collection::vec(0..4u64, 2), 3),
    ) {
        prop_assume!(monotone(&i));
        let x = Term::Var(VarId(0));
        let (y, z) = (Term::Var(VarId(1)), Term::Var(VarId(2)));
        // x occurs below g, f and h, with t beside it
        let s = Term::App(SymId(4), vec![Term::App(SymId(3), vec![t, Term::App(SymId(2), vec![x])])]);
        let s = Term::App(SymId(3), vec![s, Term::App(SymId(3), vec![y, z])]);
        let mut bumped = env.clone();
        bumped[0][0] += 1;
        let lo = eval_direct(&i, &s, &env);
        let hi = eval_direct(&i, &s, &bumped);
        prop_assert!(hi[0] > lo[0]);
        prop_assert!(hi[1] >= lo[1]);
    }
}

fn bool_ast() -> impl Strategy<Value = TemplateAst<u8>> {
    let leaf = (0..6u8).prop_map(TemplateAst::Atom);
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| TemplateAst::Not(Box::new(t))),
            prop::collection::vec(inner.clone(), 1..4).prop_map(TemplateAst::And),
            prop::collection::vec(inner, 1..4).prop_map(TemplateAst::Or),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The normal form agrees with structural evaluation under every
    /// valuation of the six atoms.
    #[test]
    fn dnf_is_equivalent(ast in bool_ast()) {
        let dnf = to_dnf(&ast).unwrap();
        for valuation in 0u32..64 {
            let holds = |a: &u8| valuation & (1 << a) != 0;
            let direct = ast
                .eval(&mut |a: &u8| Ok::<_, ()>(holds(a)))
                .unwrap();
            let via_dnf = dnf
                .iter()
                .any(|conj| conj.iter().all(|lit| holds(&lit.atom) == lit.positive));
            prop_assert_eq!(direct, via_dnf);
        }
    }
}

const SYMS: [&str; 5] = ["f", "g", "h", "+", "s"];

fn sym() -> impl Strategy<Value = String> {
    prop::sample::select(&SYMS[..]).prop_map(str::to_string)
}

fn combine(atom: BoxedStrategy<Atom>) -> impl Strategy<Value = TemplateAst<Atom>> {
    atom.prop_map(TemplateAst::Atom)
        .prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| TemplateAst::Not(Box::new(t))),
                prop::collection::vec(inner.clone(), 1..4).prop_map(TemplateAst::And),
                prop::collection::vec(inner, 1..4).prop_map(TemplateAst::Or),
            ]
        })
}

fn prec_atom() -> BoxedStrategy<Atom> {
    let rel = prop_oneof![Just(PrecRel::Gt), Just(PrecRel::Eq), Just(PrecRel::Ge)];
    (sym(), prop::collection::vec((rel, sym()), 1..4))
        .prop_map(|(first, chain)| Atom::Prec(PrecAtom { first, chain }))
        .boxed()
}

fn weights_atom() -> BoxedStrategy<Atom> {
    let rel = prop_oneof![
        Just(WeightRel::Eq),
        Just(WeightRel::Le),
        Just(WeightRel::Ge)
    ];
    (prop::collection::vec(sym(), 1..4), rel, 0..20u64)
        .prop_map(|(symbols, rel, weight)| {
            Atom::Weights(WeightsAtom {
                symbols,
                rel,
                weight,
            })
        })
        .boxed()
}

fn matrix_lit(h: usize, w: usize) -> impl Strategy<Value = MatrixLit> {
    let entry = prop_oneof![Just(Entry::Hole), (0..5u64).prop_map(Entry::Nat)];
    prop::collection::vec(prop::collection::vec(entry, w), h).prop_map(|rows| MatrixLit { rows })
}

fn inters_atom(mode: InterpKind) -> BoxedStrategy<Atom> {
    let coeff = match mode {
        InterpKind::Poly => prop_oneof![
            Just(None),
            Just(Some(CoefLit::Hole)),
            (0..9u64).prop_map(|n| Some(CoefLit::Nat(n)))
        ]
        .boxed(),
        InterpKind::Matrix => prop_oneof![
            Just(None),
            Just(Some(CoefLit::Hole)),
            (0..9u64).prop_map(|n| Some(CoefLit::Nat(n))),
            matrix_lit(2, 2).prop_map(|m| Some(CoefLit::Matrix(m))),
        ]
        .boxed(),
    };
    let constant = match mode {
        InterpKind::Poly => (0..9u64).prop_map(ConstLit::Nat).boxed(),
        InterpKind::Matrix => prop_oneof![
            Just(ConstLit::Zero),
            Just(ConstLit::One),
            matrix_lit(2, 1).prop_map(ConstLit::Matrix),
        ]
        .boxed(),
    };
    (
        prop::collection::vec(sym(), 1..3),
        prop::collection::vec(coeff, 3),
        prop::sample::subsequence(vec![0usize, 1, 2], 0..=3),
        prop::option::of(constant),
        0..2usize,
    )
        .prop_map(move |(symbols, coeffs, vars, constant, holes)| {
            let mut monomials: Vec<Monomial> = vars
                .into_iter()
                .map(|index| Monomial::Var {
                    coeff: coeffs[index].clone(),
                    index,
                })
                .collect();
            monomials.extend(constant.map(Monomial::Const));
            monomials.extend(std::iter::repeat_n(Monomial::Hole, holes));
            if monomials.is_empty() {
                monomials.push(Monomial::Hole);
            }
            Atom::Inters(IntersAtom {
                symbols,
                monomials,
                mode,
            })
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prec_templates_round_trip(t in combine(prec_atom())) {
        prop_assert_eq!(parse_prec(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn weights_templates_round_trip(t in combine(weights_atom())) {
        prop_assert_eq!(parse_weights(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn poly_templates_round_trip(t in combine(inters_atom(InterpKind::Poly))) {
        prop_assert_eq!(parse_inters(&t.to_string(), InterpKind::Poly).unwrap(), t);
    }

    #[test]
    fn matrix_templates_round_trip(t in combine(inters_atom(InterpKind::Matrix))) {
        prop_assert_eq!(parse_inters(&t.to_string(), InterpKind::Matrix).unwrap(), t);
    }

    #[test]
    fn problems_round_trip(rules in prop::collection::vec((term(3), term(3)), 0..4)) {
        let sig = signature();
        let text = {
            let mut s = String::from("(VAR x y z)\n(RULES\n");
            for (l, r) in &rules {
                if l.is_var() || !r.vars().iter().all(|x| l.contains_var(*x)) {
                    continue;
                }
                s.push_str(&format!("  {} -> {}\n", sig.format_term(l), sig.format_term(r)));
            }
            s.push_str(")\n");
            s
        };
        let trs = parse_trs(&text).unwrap();
        let again = parse_trs(&trs.to_string()).unwrap();
        prop_assert_eq!(&again, &trs);
        prop_assert_eq!(again.to_string(), trs.to_string());
    }
}
