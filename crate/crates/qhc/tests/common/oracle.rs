//! Brute-force S4 oracle, written first and kept independent of the
//! tableau: its own model enumeration and its own satisfaction relation.

use qhc::formula::Formula;

/// A small S4 model: successor bitmask per world (relation left as
/// generated: reflexive and transitive by filtering), valuations for the
/// two atoms `p` and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BruteModel {
    pub worlds: usize,
    pub succ: [u8; 3],
    pub val_p: u8,
    pub val_q: u8,
}

impl BruteModel {
    pub fn full(&self) -> u8 {
        ((1u16 << self.worlds) - 1) as u8
    }
}

fn is_transitive(succ: &[u8], n: usize) -> bool {
    for w in 0..n {
        let mut closure = succ[w];
        let mut m = succ[w];
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            closure |= succ[v];
        }
        if closure != succ[w] {
            return false;
        }
    }
    true
}

fn canonical(model: &BruteModel) -> BruteModel {
    let n = model.worlds;
    let perms: Vec<Vec<usize>> = match n {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
    };
    let remap_mask = |mask: u8, perm: &[usize]| -> u8 {
        let mut out = 0u8;
        for w in 0..n {
            if mask & (1 << w) != 0 {
                out |= 1 << perm[w];
            }
        }
        out
    };
    perms
        .iter()
        .map(|perm| {
            let mut succ = [0u8; 3];
            for w in 0..n {
                succ[perm[w]] = remap_mask(model.succ[w], perm);
            }
            BruteModel {
                worlds: n,
                succ,
                val_p: remap_mask(model.val_p, perm),
                val_q: remap_mask(model.val_q, perm),
            }
        })
        .min()
        .unwrap()
}

/// Every S4 model with at most three worlds over the atoms p, q, up to
/// isomorphism.
pub fn all_models() -> Vec<BruteModel> {
    let mut seen = std::collections::BTreeSet::new();
    for n in 1..=3usize {
        // each world's successor set contains the world itself
        let options_per_world = 1u32 << n;
        let mut counters = vec![0u32; n];
        loop {
            let mut succ = [0u8; 3];
            for w in 0..n {
                succ[w] = (counters[w] as u8) | (1 << w);
            }
            if is_transitive(&succ, n) {
                for val_p in 0..(1u16 << n) {
                    for val_q in 0..(1u16 << n) {
                        let m = BruteModel {
                            worlds: n,
                            succ,
                            val_p: val_p as u8,
                            val_q: val_q as u8,
                        };
                        seen.insert(canonical(&m));
                    }
                }
            }
            // advance counters
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                counters[i] += 1;
                if counters[i] < options_per_world {
                    break;
                }
                counters[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    seen.into_iter().collect()
}

/// Direct satisfaction: the set of worlds of `m` where `f` holds. `f`
/// must be propositional over p, q with `?`/`!` only as the box pattern.
pub fn eval(f: &Formula, m: &BruteModel) -> u8 {
    match f {
        Formula::Atom(name, _) => match name.as_str() {
            "p" => m.val_p,
            "q" => m.val_q,
            other => panic!("oracle knows only p and q, got {other}"),
        },
        Formula::FalseC => 0,
        Formula::And(l, r) => eval(l, m) & eval(r, m),
        Formula::Or(l, r) => eval(l, m) | eval(r, m),
        Formula::Imp(l, r) => (!eval(l, m) & m.full()) | eval(r, m),
        Formula::Wn(inner) => match inner.as_ref() {
            Formula::Oc(p) => {
                let pm = eval(p, m);
                let mut out = 0u8;
                for w in 0..m.worlds {
                    if m.succ[w] & !pm == 0 {
                        out |= 1 << w;
                    }
                }
                out
            }
            _ => panic!("oracle input outside the box fragment"),
        },
        other => panic!("oracle input outside the box fragment: {other:?}"),
    }
}

#[allow(dead_code)]
pub fn brute_valid(f: &Formula, models: &[BruteModel]) -> bool {
    models.iter().all(|m| eval(f, m) == m.full())
}

// ---------------------------------------------------------------------
// exhaustive enumeration of small modal formulas with semantic vectors

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    And,
    Or,
    Imp,
    Box,
}

/// The table of all formulas up to nesting depth 2 over the leaves
/// {p, q, 0}, with one semantic word per model (conjunction and
/// disjunction deduplicated by argument order).
pub struct Space {
    pub models: Vec<BruteModel>,
    pub full: Vec<u64>,
    pub formulas: Vec<Formula>,
    pub vectors: Vec<Vec<u64>>,
    pub modal_depth: Vec<u8>,
}

fn vector_of(f: &Formula, models: &[BruteModel]) -> Vec<u64> {
    models.iter().map(|m| eval(f, m) as u64).collect()
}

pub fn build_space() -> Space {
    let models = all_models();
    let full: Vec<u64> = models.iter().map(|m| m.full() as u64).collect();
    let mut formulas = vec![Formula::atom("p"), Formula::atom("q"), Formula::FalseC];
    let mut modal_depth = vec![0u8; 3];
    let grow = |formulas: &mut Vec<Formula>, modal_depth: &mut Vec<u8>| {
        let upto = formulas.len();
        for i in 0..upto {
            if modal_depth[i] < 2 {
                formulas.push(Formula::boxed(formulas[i].clone()));
                modal_depth.push(modal_depth[i] + 1);
            }
        }
        for i in 0..upto {
            for j in 0..upto {
                let md = modal_depth[i].max(modal_depth[j]);
                if j >= i {
                    formulas.push(Formula::and(formulas[i].clone(), formulas[j].clone()));
                    modal_depth.push(md);
                    formulas.push(Formula::or(formulas[i].clone(), formulas[j].clone()));
                    modal_depth.push(md);
                }
                formulas.push(Formula::imp(formulas[i].clone(), formulas[j].clone()));
                modal_depth.push(md);
            }
        }
    };
    grow(&mut formulas, &mut modal_depth);
    grow(&mut formulas, &mut modal_depth);
    let vectors = formulas.iter().map(|f| vector_of(f, &models)).collect();
    Space {
        models,
        full,
        formulas,
        vectors,
        modal_depth,
    }
}

/// Descriptors for every depth-3 formula built on top of the table.
pub fn depth3_candidates(space: &Space) -> Vec<(Kind, u32, u32)> {
    let n = space.formulas.len() as u32;
    let mut out = Vec::new();
    for i in 0..n {
        if space.modal_depth[i as usize] < 2 {
            out.push((Kind::Box, i, 0));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j >= i {
                out.push((Kind::And, i, j));
                out.push((Kind::Or, i, j));
            }
            out.push((Kind::Imp, i, j));
        }
    }
    out
}

pub fn candidate_formula(space: &Space, (kind, i, j): (Kind, u32, u32)) -> Formula {
    let l = space.formulas[i as usize].clone();
    match kind {
        Kind::Box => Formula::boxed(l),
        Kind::And => Formula::and(l, space.formulas[j as usize].clone()),
        Kind::Or => Formula::or(l, space.formulas[j as usize].clone()),
        Kind::Imp => Formula::imp(l, space.formulas[j as usize].clone()),
    }
}

/// Validity of a candidate over all models, straight from the table
/// vectors.
pub fn candidate_valid(space: &Space, (kind, i, j): (Kind, u32, u32)) -> bool {
    let a = &space.vectors[i as usize];
    match kind {
        Kind::Box => space.models.iter().enumerate().all(|(m, model)| {
            let bits = a[m] as u8;
            let mut out = 0u8;
            for w in 0..model.worlds {
                if model.succ[w] & !bits == 0 {
                    out |= 1 << w;
                }
            }
            out as u64 == space.full[m]
        }),
        Kind::And => {
            let b = &space.vectors[j as usize];
            (0..space.models.len()).all(|m| a[m] & b[m] == space.full[m])
        }
        Kind::Or => {
            let b = &space.vectors[j as usize];
            (0..space.models.len()).all(|m| a[m] | b[m] == space.full[m])
        }
        Kind::Imp => {
            let b = &space.vectors[j as usize];
            (0..space.models.len()).all(|m| (!a[m] & space.full[m]) | b[m] == space.full[m])
        }
    }
}
