//! Schemas and their instantiation.
//!
//! A schema is a formula over a mixed alphabet: object atoms plus
//! *metavariables*. Formula metavariables carry a sort and a list of term
//! parameter slots (`A`, `P(x)`, ...); a term metavariable (`t`) stands
//! for an individual variable. Every schema denotes the fully determined
//! set of its instances: the usual side conditions ("t free for x",
//! "x not free in C") are derived mechanically from the binding structure
//! during instantiation and can never be waived.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;

use crate::formula::{typecheck, Formula, FormulaError, Signature, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetaKind {
    Formula { sort: Sort, arity: usize },
    Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetaTable {
    metas: IndexMap<String, MetaKind>,
}

impl MetaTable {
    pub fn new() -> Self {
        MetaTable::default()
    }

    pub fn declare_formula(&mut self, name: impl Into<String>, sort: Sort, arity: usize) {
        self.metas
            .insert(name.into(), MetaKind::Formula { sort, arity });
    }

    pub fn declare_term(&mut self, name: impl Into<String>) {
        self.metas.insert(name.into(), MetaKind::Term);
    }

    pub fn get(&self, name: &str) -> Option<&MetaKind> {
        self.metas.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.metas.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.metas.is_empty()
    }

    /// Signature in which schema bodies are parsed and sort-checked:
    /// formula metas become atoms of their declared sort.
    pub fn as_signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (name, kind) in &self.metas {
            if let MetaKind::Formula { sort, arity } = kind {
                sig.declare(name.clone(), *sort, *arity).ok();
            }
        }
        sig
    }
}

/// A value assigned to a metavariable during instantiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    /// Formula with named parameter slots; slot variables may occur free
    /// in the body and are replaced by the argument terms at each
    /// occurrence of the metavariable.
    Formula {
        params: Vec<String>,
        body: Formula,
    },
    Term(Term),
}

impl BoundValue {
    pub fn closed(f: Formula) -> Self {
        BoundValue::Formula {
            params: Vec::new(),
            body: f,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Formula { params, body } => {
                if params.is_empty() {
                    write!(f, "{}", crate::printer::pretty(body))
                } else {
                    write!(f, "({}) {}", params.join(","), crate::printer::pretty(body))
                }
            }
            BoundValue::Term(t) => write!(f, "{t}"),
        }
    }
}

pub type Binding = BTreeMap<String, BoundValue>;

/// A schema: metavariable declarations plus a body over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub metas: MetaTable,
    pub body: Formula,
}

impl Schema {
    pub fn new(metas: MetaTable, body: Formula) -> Self {
        Schema { metas, body }
    }

    /// Schema with no metavariables at all.
    pub fn literal(body: Formula) -> Self {
        Schema {
            metas: MetaTable::new(),
            body,
        }
    }

    pub fn instantiate(&self, binding: &Binding, sig: &Signature) -> Result<Formula, FormulaError> {
        check_binding_sorts(&self.metas, binding, sig)?;
        instantiate_in(&self.body, &self.metas, binding, &mut Vec::new())
    }

    /// The frozen reading of the schema: metavariables become object atoms
    /// of the same name, in `as_signature`.
    pub fn frozen(&self) -> Formula {
        self.body.clone()
    }
}

fn check_binding_sorts(
    metas: &MetaTable,
    binding: &Binding,
    sig: &Signature,
) -> Result<(), FormulaError> {
    for (name, value) in binding {
        match (metas.get(name), value) {
            (Some(MetaKind::Formula { sort, arity }), BoundValue::Formula { params, body }) => {
                if params.len() != *arity {
                    return Err(FormulaError::ArityMismatch {
                        name: name.clone(),
                        expected: *arity,
                        got: params.len(),
                    });
                }
                // the slots are ordinary variables while checking the body
                let got = typecheck(body, sig)?;
                if got != *sort {
                    return Err(FormulaError::SortClash(format!(
                        "metavariable {name} expects a {sort} but was bound to a {got}"
                    )));
                }
            }
            (Some(MetaKind::Term), BoundValue::Term(_)) => {}
            (Some(_), _) => {
                return Err(FormulaError::SortClash(format!(
                    "metavariable {name} bound to a value of the wrong kind"
                )))
            }
            (None, _) => {
                return Err(FormulaError::SortClash(format!(
                    "binding mentions unknown metavariable {name}"
                )))
            }
        }
    }
    Ok(())
}

fn resolve_term(t: &Term, metas: &MetaTable, binding: &Binding) -> Result<Term, FormulaError> {
    match metas.get(&t.0) {
        Some(MetaKind::Term) => match binding.get(&t.0) {
            Some(BoundValue::Term(u)) => Ok(u.clone()),
            _ => Err(FormulaError::SortClash(format!(
                "unbound term metavariable {t}"
            ))),
        },
        _ => Ok(t.clone()),
    }
}

fn instantiate_in(
    body: &Formula,
    metas: &MetaTable,
    binding: &Binding,
    binders: &mut Vec<String>,
) -> Result<Formula, FormulaError> {
    match body {
        Formula::Atom(name, args) => {
            let resolved: Vec<Term> = args
                .iter()
                .map(|t| resolve_term(t, metas, binding))
                .collect::<Result<_, _>>()?;
            // a term metavariable may not be instantiated to a variable
            // that is bound at this occurrence
            for (orig, new) in args.iter().zip(&resolved) {
                if orig != new && binders.iter().any(|b| b == &new.0) {
                    return Err(FormulaError::CaptureViolation(format!(
                        "term {new} for {orig} is captured by an enclosing binder"
                    )));
                }
            }
            match metas.get(name) {
                Some(MetaKind::Formula { .. }) => {
                    let (params, fbody) = match binding.get(name) {
                        Some(BoundValue::Formula { params, body }) => (params, body),
                        _ => {
                            return Err(FormulaError::SortClash(format!(
                                "unbound metavariable {name}"
                            )))
                        }
                    };
                    // side condition: free variables of the bound formula
                    // other than its slots must stay free at this site
                    for v in fbody.free_vars() {
                        if !params.contains(&v) && binders.iter().any(|b| b == &v) {
                            return Err(FormulaError::CaptureViolation(format!(
                                "variable {v} free in the value of {name} would be captured"
                            )));
                        }
                    }
                    subst_slots(fbody, params, &resolved, &mut Vec::new())
                }
                Some(MetaKind::Term) => Err(FormulaError::SortClash(format!(
                    "term metavariable {name} used as a formula"
                ))),
                None => Ok(Formula::Atom(name.clone(), resolved)),
            }
        }
        Formula::FalseC | Formula::FalseI => Ok(body.clone()),
        Formula::And(l, r) => Ok(Formula::and(
            instantiate_in(l, metas, binding, binders)?,
            instantiate_in(r, metas, binding, binders)?,
        )),
        Formula::Or(l, r) => Ok(Formula::or(
            instantiate_in(l, metas, binding, binders)?,
            instantiate_in(r, metas, binding, binders)?,
        )),
        Formula::Imp(l, r) => Ok(Formula::imp(
            instantiate_in(l, metas, binding, binders)?,
            instantiate_in(r, metas, binding, binders)?,
        )),
        Formula::Forall(v, b) => {
            binders.push(v.clone());
            let inner = instantiate_in(b, metas, binding, binders);
            binders.pop();
            Ok(Formula::forall(v.clone(), inner?))
        }
        Formula::Exists(v, b) => {
            binders.push(v.clone());
            let inner = instantiate_in(b, metas, binding, binders);
            binders.pop();
            Ok(Formula::exists(v.clone(), inner?))
        }
        Formula::Wn(g) => Ok(Formula::wn(instantiate_in(g, metas, binding, binders)?)),
        Formula::Oc(g) => Ok(Formula::oc(instantiate_in(g, metas, binding, binders)?)),
    }
}

/// Simultaneous substitution of argument terms for the parameter slots of
/// a bound formula, rejecting capture ("t free for x").
fn subst_slots(
    body: &Formula,
    params: &[String],
    args: &[Term],
    binders: &mut Vec<String>,
) -> Result<Formula, FormulaError> {
    let subst_of =
        |v: &str| -> Option<&Term> { params.iter().position(|p| p == v).map(|i| &args[i]) };
    match body {
        Formula::Atom(name, ats) => {
            let mut out = Vec::with_capacity(ats.len());
            for t in ats {
                if binders.iter().any(|b| b == &t.0) {
                    out.push(t.clone()); // bound occurrence of a slot name
                } else if let Some(rep) = subst_of(&t.0) {
                    if binders.iter().any(|b| b == &rep.0) {
                        return Err(FormulaError::CaptureViolation(format!(
                            "argument {rep} is not free for slot {t}"
                        )));
                    }
                    out.push(rep.clone());
                } else {
                    out.push(t.clone());
                }
            }
            Ok(Formula::Atom(name.clone(), out))
        }
        Formula::FalseC | Formula::FalseI => Ok(body.clone()),
        Formula::And(l, r) => Ok(Formula::and(
            subst_slots(l, params, args, binders)?,
            subst_slots(r, params, args, binders)?,
        )),
        Formula::Or(l, r) => Ok(Formula::or(
            subst_slots(l, params, args, binders)?,
            subst_slots(r, params, args, binders)?,
        )),
        Formula::Imp(l, r) => Ok(Formula::imp(
            subst_slots(l, params, args, binders)?,
            subst_slots(r, params, args, binders)?,
        )),
        Formula::Forall(v, b) => {
            binders.push(v.clone());
            let inner = subst_slots(b, params, args, binders);
            binders.pop();
            Ok(Formula::forall(v.clone(), inner?))
        }
        Formula::Exists(v, b) => {
            binders.push(v.clone());
            let inner = subst_slots(b, params, args, binders);
            binders.pop();
            Ok(Formula::exists(v.clone(), inner?))
        }
        Formula::Wn(g) => Ok(Formula::wn(subst_slots(g, params, args, binders)?)),
        Formula::Oc(g) => Ok(Formula::oc(subst_slots(g, params, args, binders)?)),
    }
}

/// Replace whole atoms by formulas in a plain formula (no meta table):
/// the frozen-atom substitution used when splicing lemma proofs. Arity
/// and capture are checked exactly as in `Schema::instantiate`.
pub fn subst_atoms(formula: &Formula, binding: &Binding) -> Result<Formula, FormulaError> {
    let mut metas = MetaTable::new();
    for (name, v) in binding {
        match v {
            BoundValue::Formula { params, .. } => {
                // sort is irrelevant here; arity comes from the binding
                metas.declare_formula(name.clone(), Sort::Problem, params.len());
            }
            BoundValue::Term(_) => metas.declare_term(name.clone()),
        }
    }
    instantiate_in(formula, &metas, binding, &mut Vec::new())
}

/// One-way structural match of a schema body against a concrete formula.
///
/// Only nullary formula metavariables and term metavariables are
/// inferred; a schema with parameterised metavariables needs an explicit
/// binding. Returns `None` when the shapes disagree.
pub fn match_schema(pattern: &Formula, metas: &MetaTable, concrete: &Formula) -> Option<Binding> {
    let mut binding = Binding::new();
    if match_into(pattern, metas, concrete, &mut binding) {
        Some(binding)
    } else {
        None
    }
}

/// As [`match_schema`], but extends a pre-seeded binding; used to match
/// several rule premises consistently.
pub fn match_into(
    pattern: &Formula,
    metas: &MetaTable,
    concrete: &Formula,
    binding: &mut Binding,
) -> bool {
    match pattern {
        Formula::Atom(name, args) => match metas.get(name) {
            Some(MetaKind::Formula { arity, .. }) => {
                if *arity != 0 || !args.is_empty() {
                    return false; // parameterised: not inferable
                }
                match binding.get(name) {
                    Some(BoundValue::Formula { body, .. }) => body == concrete,
                    Some(_) => false,
                    None => {
                        binding.insert(name.clone(), BoundValue::closed(concrete.clone()));
                        true
                    }
                }
            }
            Some(MetaKind::Term) => false,
            None => match concrete {
                Formula::Atom(cname, cargs) if cname == name && cargs.len() == args.len() => {
                    args.iter().zip(cargs).all(|(p, c)| match metas.get(&p.0) {
                        Some(MetaKind::Term) => match binding.get(&p.0) {
                            Some(BoundValue::Term(t)) => t == c,
                            Some(_) => false,
                            None => {
                                binding.insert(p.0.clone(), BoundValue::Term(c.clone()));
                                true
                            }
                        },
                        _ => p == c,
                    })
                }
                _ => false,
            },
        },
        Formula::FalseC => matches!(concrete, Formula::FalseC),
        Formula::FalseI => matches!(concrete, Formula::FalseI),
        Formula::And(l, r) => match concrete {
            Formula::And(cl, cr) => {
                match_into(l, metas, cl, binding) && match_into(r, metas, cr, binding)
            }
            _ => false,
        },
        Formula::Or(l, r) => match concrete {
            Formula::Or(cl, cr) => {
                match_into(l, metas, cl, binding) && match_into(r, metas, cr, binding)
            }
            _ => false,
        },
        Formula::Imp(l, r) => match concrete {
            Formula::Imp(cl, cr) => {
                match_into(l, metas, cl, binding) && match_into(r, metas, cr, binding)
            }
            _ => false,
        },
        Formula::Forall(v, b) => match concrete {
            Formula::Forall(cv, cb) => v == cv && match_into(b, metas, cb, binding),
            _ => false,
        },
        Formula::Exists(v, b) => match concrete {
            Formula::Exists(cv, cb) => v == cv && match_into(b, metas, cb, binding),
            _ => false,
        },
        Formula::Wn(g) => match concrete {
            Formula::Wn(cg) => match_into(g, metas, cg, binding),
            _ => false,
        },
        Formula::Oc(g) => match concrete {
            Formula::Oc(cg) => match_into(g, metas, cg, binding),
            _ => false,
        },
    }
}
