//! The two-sorted formula language.
//!
//! Every formula is either a *problem* (the intuitionistic sort) or a
//! *proposition* (the classical sort). The type-specific connectives
//! (`&`, `|`, `->`, `forall`, `exists`) require both operands of one sort
//! and stay in that sort; the two conversion connectives cross sorts:
//! `?` takes a problem to the proposition "a solution exists", `!` takes
//! a proposition to the problem "find a proof".
//!
//! Negation, `<->`, `top` and `1` are abbreviations and are expanded by
//! the parser; the kernel only ever sees the nine core constructors.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The sort of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Problem,
    Proposition,
}

impl Sort {
    /// The falsity constant of this sort (`bot` for problems, `0` for propositions).
    pub fn falsity(self) -> Formula {
        match self {
            Sort::Problem => Formula::FalseI,
            Sort::Proposition => Formula::FalseC,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Problem => write!(f, "problem"),
            Sort::Proposition => write!(f, "proposition"),
        }
    }
}

/// Terms are individual variables; there are no function symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term(pub String);

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Core formulas. `Wn` is the `?` connective, `Oc` is `!`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(String, Vec<Term>),
    /// Classical falsity `0`.
    FalseC,
    /// Intuitionistic absurdity `bot`.
    FalseI,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Wn(Box<Formula>),
    Oc(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into(), Vec::new())
    }

    pub fn atom_args(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(name.into(), args)
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn wn(f: Formula) -> Self {
        Formula::Wn(Box::new(f))
    }

    pub fn oc(f: Formula) -> Self {
        Formula::Oc(Box::new(f))
    }

    /// `~f`, expanded: `f -> bot` on problems, `f -> 0` on propositions.
    pub fn neg(f: Formula, sort: Sort) -> Self {
        Formula::imp(f, sort.falsity())
    }

    /// `l <-> r`, expanded to `(l -> r) & (r -> l)`.
    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(Formula::imp(l.clone(), r.clone()), Formula::imp(r, l))
    }

    /// `box p` = `?!p`.
    pub fn boxed(p: Formula) -> Self {
        Formula::wn(Formula::oc(p))
    }

    /// `nabla a` = `!?a`.
    pub fn nabla(a: Formula) -> Self {
        Formula::oc(Formula::wn(a))
    }

    /// Variables with a free occurrence.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                for Term(v) in args {
                    if !bound.iter().any(|b| b == v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::FalseC | Formula::FalseI => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::Wn(g) | Formula::Oc(g) => g.collect_free(bound, out),
        }
    }

    /// True if `var` occurs free.
    pub fn has_free_var(&self, var: &str) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(|Term(v)| v == var),
            Formula::FalseC | Formula::FalseI => false,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.has_free_var(var) || r.has_free_var(var)
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                v != var && body.has_free_var(var)
            }
            Formula::Wn(g) | Formula::Oc(g) => g.has_free_var(var),
        }
    }

    /// True if the formula mentions no quantifiers and no term arguments.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_, args) => args.is_empty(),
            Formula::FalseC | Formula::FalseI => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.is_propositional() && r.is_propositional()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
            Formula::Wn(g) | Formula::Oc(g) => g.is_propositional(),
        }
    }

    /// True if neither `?` nor `!` occurs.
    pub fn is_modality_free(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::FalseC | Formula::FalseI => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.is_modality_free() && r.is_modality_free()
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.is_modality_free(),
            Formula::Wn(_) | Formula::Oc(_) => false,
        }
    }

    /// True if every `?` sits directly on top of a `!` (the `box` fragment).
    pub fn in_box_fragment(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::FalseC | Formula::FalseI => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.in_box_fragment() && r.in_box_fragment()
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.in_box_fragment(),
            Formula::Wn(inner) => match inner.as_ref() {
                Formula::Oc(p) => p.in_box_fragment(),
                _ => false,
            },
            Formula::Oc(_) => false,
        }
    }

    /// True if every `!` sits directly on top of a `?` (the `nabla` fragment).
    pub fn in_nabla_fragment(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::FalseC | Formula::FalseI => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.in_nabla_fragment() && r.in_nabla_fragment()
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.in_nabla_fragment(),
            Formula::Oc(inner) => match inner.as_ref() {
                Formula::Wn(a) => a.in_nabla_fragment(),
                _ => false,
            },
            Formula::Wn(_) => false,
        }
    }
}

/// Declaration of one atom family: name, sort, number of term parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomDecl {
    pub name: String,
    pub sort: Sort,
    pub arity: usize,
}

/// A declared alphabet of atoms. Names are unique; the two sorts share
/// one namespace so that concrete syntax stays unambiguous.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    atoms: IndexMap<String, AtomDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("atom {0} is not declared")]
    UndeclaredAtom(String),
    #[error("atom {name} expects {expected} argument(s) but got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("sort clash: {0}")]
    SortClash(String),
    #[error("capture violation: {0}")]
    CaptureViolation(String),
    #[error("atom {0} declared twice")]
    DuplicateAtom(String),
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn declare(
        &mut self,
        name: impl Into<String>,
        sort: Sort,
        arity: usize,
    ) -> Result<(), FormulaError> {
        let name = name.into();
        if self.atoms.contains_key(&name) {
            return Err(FormulaError::DuplicateAtom(name));
        }
        self.atoms
            .insert(name.clone(), AtomDecl { name, sort, arity });
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&AtomDecl> {
        self.atoms.get(name)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &AtomDecl> {
        self.atoms.values()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.atoms.contains_key(name)
    }

    /// Union of two signatures; clashing redeclarations are an error.
    pub fn merged(&self, other: &Signature) -> Result<Signature, FormulaError> {
        let mut out = self.clone();
        for decl in other.atoms.values() {
            match out.atoms.get(&decl.name) {
                Some(existing) if existing == decl => {}
                Some(_) => return Err(FormulaError::DuplicateAtom(decl.name.clone())),
                None => {
                    out.atoms.insert(decl.name.clone(), decl.clone());
                }
            }
        }
        Ok(out)
    }

    /// Name-preserving sort flip of every atom; used by the retyping
    /// translations.
    pub fn retyped(&self, to: Sort) -> Signature {
        let mut out = Signature::new();
        for decl in self.atoms.values() {
            out.atoms.insert(
                decl.name.clone(),
                AtomDecl {
                    name: decl.name.clone(),
                    sort: to,
                    arity: decl.arity,
                },
            );
        }
        out
    }

    /// The standard ambient signature used when none is supplied on the
    /// command line: `a b c d f g` are 0-ary problems, `p q r s` 0-ary
    /// propositions.
    pub fn default_cli() -> Signature {
        let mut sig = Signature::new();
        for n in ["a", "b", "c", "d", "f", "g"] {
            sig.declare(n, Sort::Problem, 0).unwrap();
        }
        for n in ["p", "q", "r", "s"] {
            sig.declare(n, Sort::Proposition, 0).unwrap();
        }
        sig
    }
}

/// Compute the unique sort of a formula over `sig`, or fail.
pub fn typecheck(formula: &Formula, sig: &Signature) -> Result<Sort, FormulaError> {
    match formula {
        Formula::Atom(name, args) => {
            let decl = sig
                .lookup(name)
                .ok_or_else(|| FormulaError::UndeclaredAtom(name.clone()))?;
            if decl.arity != args.len() {
                return Err(FormulaError::ArityMismatch {
                    name: name.clone(),
                    expected: decl.arity,
                    got: args.len(),
                });
            }
            Ok(decl.sort)
        }
        Formula::FalseC => Ok(Sort::Proposition),
        Formula::FalseI => Ok(Sort::Problem),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            let ls = typecheck(l, sig)?;
            let rs = typecheck(r, sig)?;
            if ls != rs {
                return Err(FormulaError::SortClash(format!(
                    "binary connective applied to a {ls} and a {rs}"
                )));
            }
            Ok(ls)
        }
        Formula::Forall(_, body) | Formula::Exists(_, body) => typecheck(body, sig),
        Formula::Wn(inner) => match typecheck(inner, sig)? {
            Sort::Problem => Ok(Sort::Proposition),
            Sort::Proposition => Err(FormulaError::SortClash("? applied to a proposition".into())),
        },
        Formula::Oc(inner) => match typecheck(inner, sig)? {
            Sort::Proposition => Ok(Sort::Problem),
            Sort::Problem => Err(FormulaError::SortClash("! applied to a problem".into())),
        },
    }
}

/// Capture-free replacement of free occurrences of `var` by `term`.
///
/// The substitution is checked, not repaired: if some free occurrence of
/// `var` lies under a quantifier binding `term`, the instance is illegal
/// and the substitution fails.
pub fn subst_term(formula: &Formula, var: &str, term: &Term) -> Result<Formula, FormulaError> {
    if term.0 == var {
        return Ok(formula.clone());
    }
    match formula {
        Formula::Atom(name, args) => Ok(Formula::Atom(
            name.clone(),
            args.iter()
                .map(|t| if t.0 == var { term.clone() } else { t.clone() })
                .collect(),
        )),
        Formula::FalseC | Formula::FalseI => Ok(formula.clone()),
        Formula::And(l, r) => Ok(Formula::and(
            subst_term(l, var, term)?,
            subst_term(r, var, term)?,
        )),
        Formula::Or(l, r) => Ok(Formula::or(
            subst_term(l, var, term)?,
            subst_term(r, var, term)?,
        )),
        Formula::Imp(l, r) => Ok(Formula::imp(
            subst_term(l, var, term)?,
            subst_term(r, var, term)?,
        )),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let rebuild = |b: Formula| match formula {
                Formula::Forall(..) => Formula::forall(v.clone(), b),
                _ => Formula::exists(v.clone(), b),
            };
            if v == var {
                // occurrences below are bound
                return Ok(formula.clone());
            }
            if v == &term.0 && body.has_free_var(var) {
                return Err(FormulaError::CaptureViolation(format!(
                    "substituting {term} for {var} would capture it under the binder for {v}"
                )));
            }
            Ok(rebuild(subst_term(body, var, term)?))
        }
        Formula::Wn(g) => Ok(Formula::wn(subst_term(g, var, term)?)),
        Formula::Oc(g) => Ok(Formula::oc(subst_term(g, var, term)?)),
    }
}
