#![allow(dead_code)]

//! Shared test support: the brute-force S4 oracle (independent of the
//! tableau), formula enumerators, and seeded fuzz generators.

pub mod oracle;

use qhc::formula::{Formula, Signature, Sort, Term};
use rand::prelude::*;

/// Deterministic RNG for fuzz-style tests.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Random propositional QHC formula of the requested sort over the
/// ambient signature.
pub fn random_formula(r: &mut impl Rng, sort: Sort, depth: usize) -> Formula {
    if depth == 0 {
        return match sort {
            Sort::Problem => match r.gen_range(0..3) {
                0 => Formula::atom("a"),
                1 => Formula::atom("b"),
                _ => Formula::FalseI,
            },
            Sort::Proposition => match r.gen_range(0..3) {
                0 => Formula::atom("p"),
                1 => Formula::atom("q"),
                _ => Formula::FalseC,
            },
        };
    }
    match r.gen_range(0..6) {
        0 => random_formula(r, sort, 0),
        1 => Formula::and(
            random_formula(r, sort, depth - 1),
            random_formula(r, sort, depth - 1),
        ),
        2 => Formula::or(
            random_formula(r, sort, depth - 1),
            random_formula(r, sort, depth - 1),
        ),
        3 => Formula::imp(
            random_formula(r, sort, depth - 1),
            random_formula(r, sort, depth - 1),
        ),
        _ => match sort {
            Sort::Proposition => Formula::wn(random_formula(r, Sort::Problem, depth - 1)),
            Sort::Problem => Formula::oc(random_formula(r, Sort::Proposition, depth - 1)),
        },
    }
}

/// Random quantifier-free formula of the box fragment (QS4 language).
pub fn random_qs4_formula(r: &mut impl Rng, depth: usize) -> Formula {
    if depth == 0 {
        return match r.gen_range(0..3) {
            0 => Formula::atom("p"),
            1 => Formula::atom("q"),
            _ => Formula::FalseC,
        };
    }
    match r.gen_range(0..5) {
        0 => random_qs4_formula(r, 0),
        1 => Formula::and(
            random_qs4_formula(r, depth - 1),
            random_qs4_formula(r, depth - 1),
        ),
        2 => Formula::or(
            random_qs4_formula(r, depth - 1),
            random_qs4_formula(r, depth - 1),
        ),
        3 => Formula::imp(
            random_qs4_formula(r, depth - 1),
            random_qs4_formula(r, depth - 1),
        ),
        _ => Formula::boxed(random_qs4_formula(r, depth - 1)),
    }
}

fn size_of(f: &Formula) -> usize {
    match f {
        Formula::Atom(..) | Formula::FalseC | Formula::FalseI => 1,
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => 1 + size_of(l) + size_of(r),
        Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + size_of(b),
        Formula::Wn(g) | Formula::Oc(g) => 1 + size_of(g),
    }
}

/// Generate theorems of QHC by forward chaining: random instances of the
/// axiom schemata, closed under modus ponens and the two introduction
/// rules. Everything returned is derivable by construction.
pub fn fuzz_theorems(seed: u64, count: usize) -> Vec<Formula> {
    let qhc = qhc::calculi::builtin("QHC").unwrap();
    let sig = Signature::default_cli();
    let mut r = rng(seed);
    let mut pool: Vec<Formula> = Vec::new();
    let axioms: Vec<_> = qhc
        .axioms
        .values()
        .filter(|s| {
            // propositional schemata only: no parameter slots, no term metas
            s.metas.names().all(|n| {
                matches!(
                    s.metas.get(n),
                    Some(qhc::schema::MetaKind::Formula { arity: 0, .. })
                )
            }) && s.body.is_propositional()
        })
        .cloned()
        .collect();
    let mut guard = 0usize;
    while pool.len() < count && guard < count * 60 {
        guard += 1;
        match r.gen_range(0..10) {
            // a fresh axiom instance most of the time
            0..=5 => {
                let schema = axioms.choose(&mut r).unwrap().clone();
                let mut binding = qhc::schema::Binding::new();
                for name in schema.metas.names() {
                    if let Some(qhc::schema::MetaKind::Formula { sort, .. }) =
                        schema.metas.get(name)
                    {
                        let depth = r.gen_range(0..3);
                        let value = random_formula(&mut r, *sort, depth);
                        binding.insert(name.clone(), qhc::schema::BoundValue::closed(value));
                    }
                }
                if let Ok(inst) = schema.instantiate(&binding, &sig) {
                    if size_of(&inst) <= 60 {
                        pool.push(inst);
                    }
                }
            }
            6 | 7 => {
                // modus ponens on a random implication in the pool
                if pool.is_empty() {
                    continue;
                }
                let f = pool.choose(&mut r).unwrap().clone();
                if let Formula::Imp(ant, con) = &f {
                    if pool.contains(ant) && size_of(con) <= 60 {
                        pool.push(con.as_ref().clone());
                    }
                }
            }
            8 => {
                // a / ?a
                if let Some(f) = pool.choose(&mut r) {
                    if qhc::formula::typecheck(f, &sig) == Ok(Sort::Problem) && size_of(f) < 60 {
                        let g = Formula::wn(f.clone());
                        pool.push(g);
                    }
                }
            }
            _ => {
                // p / !p
                if let Some(f) = pool.choose(&mut r) {
                    if qhc::formula::typecheck(f, &sig) == Ok(Sort::Proposition) && size_of(f) < 60
                    {
                        let g = Formula::oc(f.clone());
                        pool.push(g);
                    }
                }
            }
        }
    }
    pool.truncate(count);
    pool
}

/// used by fuzz generators that want fresh variables in atoms
#[allow(dead_code)]
pub fn var(name: &str) -> Term {
    Term::var(name)
}
