//! Syntactic interpretations.
//!
//! Four translations and two embeddings, each a total, sort-respecting
//! (or systematically retyping) formula transformer:
//!
//! * `box`: the whole language into the box fragment (QS4). Atomic
//!   problems are retyped as propositions and box-prefixed, the
//!   intuitionistic `->` and `forall` become classical and box-prefixed,
//!   the other intuitionistic connectives just become classical, `bot`
//!   becomes `0`, `?` is erased and `!` becomes `box`.
//! * `negneg`: the mirror image into the modality-free problem language
//!   (QH). Atomic propositions are retyped and `~~`-prefixed, classical
//!   `|` and `exists` become intuitionistic and `~~`-prefixed, the other
//!   classical connectives just become intuitionistic, `0` becomes
//!   `bot`, `!` is erased and `?` becomes `~~`.
//! * `nabla`: into the language itself; atomic problems and the
//!   intuitionistic `|` and `exists` are `nabla`-prefixed.
//! * `diamond`: into the language itself; classical `->` and `forall`
//!   are box-prefixed, and atomic propositions, `?`, and the classical
//!   `|` and `exists` are prefixed by `box diamond box`, with
//!   `diamond p` short for `~box ~p`.
//!
//! The embeddings read a box-fragment (resp. nabla-fragment) formula as
//! a formula of the full language; since `box` *is* `?!` here, they are
//! identities on the tree after a language check. `nabla_to_negneg`
//! rewrites every `nabla` into `~~`.
//!
//! Each transformer lives behind the [`Interpretation`] trait and is
//! registered by name, so front ends can select one at run time.

use thiserror::Error;

use crate::formula::{typecheck, Formula, FormulaError, Signature, Sort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("input is not in the {0} fragment")]
    NotInFragment(&'static str),
    #[error("{0}")]
    Formula(#[from] FormulaError),
}

/// A named formula transformer between two languages.
pub trait Interpretation: Send + Sync {
    fn name(&self) -> &'static str;
    /// Language the output lives in, for reporting.
    fn target(&self) -> &'static str;
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError>;
    /// Signature in which the output typechecks.
    fn target_signature(&self, sig: &Signature) -> Signature {
        sig.clone()
    }
}

fn neg_i(f: Formula) -> Formula {
    Formula::imp(f, Formula::FalseI)
}

fn neg_c(f: Formula) -> Formula {
    Formula::imp(f, Formula::FalseC)
}

fn double_neg(f: Formula) -> Formula {
    neg_i(neg_i(f))
}

/// `box diamond box p` with `diamond q = ~box ~q`.
fn box_dia_box(p: Formula) -> Formula {
    Formula::boxed(neg_c(Formula::boxed(neg_c(Formula::boxed(p)))))
}

fn sort_of(f: &Formula, sig: &Signature) -> Sort {
    // callers translate well-typed formulas only
    typecheck(f, sig).expect("translating an ill-typed formula")
}

/// The box translation into the QS4 fragment.
pub fn box_translate(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::Atom(..) => match sort_of(f, sig) {
            Sort::Proposition => f.clone(),
            Sort::Problem => Formula::boxed(f.clone()),
        },
        Formula::FalseC | Formula::FalseI => Formula::FalseC,
        Formula::And(l, r) => Formula::and(box_translate(l, sig), box_translate(r, sig)),
        Formula::Or(l, r) => Formula::or(box_translate(l, sig), box_translate(r, sig)),
        Formula::Imp(l, r) => {
            let core = Formula::imp(box_translate(l, sig), box_translate(r, sig));
            match sort_of(f, sig) {
                Sort::Problem => Formula::boxed(core),
                Sort::Proposition => core,
            }
        }
        Formula::Forall(v, b) => {
            let core = Formula::forall(v.clone(), box_translate(b, sig));
            match sort_of(f, sig) {
                Sort::Problem => Formula::boxed(core),
                Sort::Proposition => core,
            }
        }
        Formula::Exists(v, b) => Formula::exists(v.clone(), box_translate(b, sig)),
        Formula::Wn(g) => box_translate(g, sig),
        Formula::Oc(g) => Formula::boxed(box_translate(g, sig)),
    }
}

/// The double negation translation into the QH fragment.
pub fn negneg_translate(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::Atom(..) => match sort_of(f, sig) {
            Sort::Problem => f.clone(),
            Sort::Proposition => double_neg(f.clone()),
        },
        Formula::FalseC | Formula::FalseI => Formula::FalseI,
        Formula::And(l, r) => Formula::and(negneg_translate(l, sig), negneg_translate(r, sig)),
        Formula::Imp(l, r) => Formula::imp(negneg_translate(l, sig), negneg_translate(r, sig)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), negneg_translate(b, sig)),
        Formula::Or(l, r) => {
            let core = Formula::or(negneg_translate(l, sig), negneg_translate(r, sig));
            match sort_of(f, sig) {
                Sort::Proposition => double_neg(core),
                Sort::Problem => core,
            }
        }
        Formula::Exists(v, b) => {
            let core = Formula::exists(v.clone(), negneg_translate(b, sig));
            match sort_of(f, sig) {
                Sort::Proposition => double_neg(core),
                Sort::Problem => core,
            }
        }
        Formula::Oc(g) => negneg_translate(g, sig),
        Formula::Wn(g) => double_neg(negneg_translate(g, sig)),
    }
}

/// The nabla interpretation of the language in itself.
pub fn nabla_translate(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::Atom(..) => match sort_of(f, sig) {
            Sort::Problem => Formula::nabla(f.clone()),
            Sort::Proposition => f.clone(),
        },
        Formula::FalseC | Formula::FalseI => f.clone(),
        Formula::And(l, r) => Formula::and(nabla_translate(l, sig), nabla_translate(r, sig)),
        Formula::Imp(l, r) => Formula::imp(nabla_translate(l, sig), nabla_translate(r, sig)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), nabla_translate(b, sig)),
        Formula::Or(l, r) => {
            let core = Formula::or(nabla_translate(l, sig), nabla_translate(r, sig));
            match sort_of(f, sig) {
                Sort::Problem => Formula::nabla(core),
                Sort::Proposition => core,
            }
        }
        Formula::Exists(v, b) => {
            let core = Formula::exists(v.clone(), nabla_translate(b, sig));
            match sort_of(f, sig) {
                Sort::Problem => Formula::nabla(core),
                Sort::Proposition => core,
            }
        }
        Formula::Wn(g) => Formula::wn(nabla_translate(g, sig)),
        Formula::Oc(g) => Formula::oc(nabla_translate(g, sig)),
    }
}

/// The diamond interpretation of the language in itself.
pub fn diamond_translate(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::Atom(..) => match sort_of(f, sig) {
            Sort::Proposition => box_dia_box(f.clone()),
            Sort::Problem => f.clone(),
        },
        Formula::FalseC | Formula::FalseI => f.clone(),
        Formula::And(l, r) => Formula::and(diamond_translate(l, sig), diamond_translate(r, sig)),
        Formula::Imp(l, r) => {
            let core = Formula::imp(diamond_translate(l, sig), diamond_translate(r, sig));
            match sort_of(f, sig) {
                Sort::Proposition => Formula::boxed(core),
                Sort::Problem => core,
            }
        }
        Formula::Forall(v, b) => {
            let core = Formula::forall(v.clone(), diamond_translate(b, sig));
            match sort_of(f, sig) {
                Sort::Proposition => Formula::boxed(core),
                Sort::Problem => core,
            }
        }
        Formula::Or(l, r) => {
            let core = Formula::or(diamond_translate(l, sig), diamond_translate(r, sig));
            match sort_of(f, sig) {
                Sort::Proposition => box_dia_box(core),
                Sort::Problem => core,
            }
        }
        Formula::Exists(v, b) => {
            let core = Formula::exists(v.clone(), diamond_translate(b, sig));
            match sort_of(f, sig) {
                Sort::Proposition => box_dia_box(core),
                Sort::Problem => core,
            }
        }
        Formula::Wn(g) => box_dia_box(Formula::wn(diamond_translate(g, sig))),
        Formula::Oc(g) => Formula::oc(diamond_translate(g, sig)),
    }
}

/// Read a QS4 formula (propositions, `?`/`!` only as `box`) as a formula
/// of the full language. With `box` spelled `?!`, this is the identity
/// on the tree.
pub fn embed_qs4(f: &Formula) -> Result<Formula, TranslateError> {
    if f.in_box_fragment() {
        Ok(f.clone())
    } else {
        Err(TranslateError::NotInFragment("box"))
    }
}

/// Read a QH4 formula (problems, `?`/`!` only as `nabla`) as a formula
/// of the full language.
pub fn embed_qh4(f: &Formula) -> Result<Formula, TranslateError> {
    if f.in_nabla_fragment() {
        Ok(f.clone())
    } else {
        Err(TranslateError::NotInFragment("nabla"))
    }
}

/// Substitute `~~` for every `nabla` (outermost first).
pub fn nabla_to_negneg(f: &Formula) -> Formula {
    if let Formula::Oc(inner) = f {
        if let Formula::Wn(a) = inner.as_ref() {
            return double_neg(nabla_to_negneg(a));
        }
    }
    match f {
        Formula::Atom(..) | Formula::FalseC | Formula::FalseI => f.clone(),
        Formula::And(l, r) => Formula::and(nabla_to_negneg(l), nabla_to_negneg(r)),
        Formula::Or(l, r) => Formula::or(nabla_to_negneg(l), nabla_to_negneg(r)),
        Formula::Imp(l, r) => Formula::imp(nabla_to_negneg(l), nabla_to_negneg(r)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), nabla_to_negneg(b)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), nabla_to_negneg(b)),
        Formula::Wn(g) => Formula::wn(nabla_to_negneg(g)),
        Formula::Oc(g) => Formula::oc(nabla_to_negneg(g)),
    }
}

/// Regard a modality-free problem formula as classical: a name-preserving
/// retyping that swaps `bot` for `0`. The inclusion arrow of the
/// commuting translation squares.
pub fn retype_problem_as_classical(f: &Formula) -> Result<Formula, TranslateError> {
    if !f.is_modality_free() {
        return Err(TranslateError::NotInFragment("modality-free"));
    }
    fn go(f: &Formula) -> Formula {
        match f {
            Formula::Atom(..) => f.clone(),
            Formula::FalseI | Formula::FalseC => Formula::FalseC,
            Formula::And(l, r) => Formula::and(go(l), go(r)),
            Formula::Or(l, r) => Formula::or(go(l), go(r)),
            Formula::Imp(l, r) => Formula::imp(go(l), go(r)),
            Formula::Forall(v, b) => Formula::forall(v.clone(), go(b)),
            Formula::Exists(v, b) => Formula::exists(v.clone(), go(b)),
            Formula::Wn(..) | Formula::Oc(..) => unreachable!(),
        }
    }
    Ok(go(f))
}

struct BoxInterp;
struct NegNegInterp;
struct NablaInterp;
struct DiamondInterp;
struct EmbedQs4;
struct EmbedQh4;

impl Interpretation for BoxInterp {
    fn name(&self) -> &'static str {
        "box"
    }
    fn target(&self) -> &'static str {
        "QS4"
    }
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError> {
        typecheck(f, sig)?;
        Ok(box_translate(f, sig))
    }
    fn target_signature(&self, sig: &Signature) -> Signature {
        sig.retyped(Sort::Proposition)
    }
}

impl Interpretation for NegNegInterp {
    fn name(&self) -> &'static str {
        "negneg"
    }
    fn target(&self) -> &'static str {
        "QH"
    }
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError> {
        typecheck(f, sig)?;
        Ok(negneg_translate(f, sig))
    }
    fn target_signature(&self, sig: &Signature) -> Signature {
        sig.retyped(Sort::Problem)
    }
}

impl Interpretation for NablaInterp {
    fn name(&self) -> &'static str {
        "nabla"
    }
    fn target(&self) -> &'static str {
        "QHC"
    }
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError> {
        typecheck(f, sig)?;
        Ok(nabla_translate(f, sig))
    }
}

impl Interpretation for DiamondInterp {
    fn name(&self) -> &'static str {
        "diamond"
    }
    fn target(&self) -> &'static str {
        "QHC"
    }
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError> {
        typecheck(f, sig)?;
        Ok(diamond_translate(f, sig))
    }
}

impl Interpretation for EmbedQs4 {
    fn name(&self) -> &'static str {
        "embed-qs4"
    }
    fn target(&self) -> &'static str {
        "QHC"
    }
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError> {
        typecheck(f, sig)?;
        embed_qs4(f)
    }
}

impl Interpretation for EmbedQh4 {
    fn name(&self) -> &'static str {
        "embed-qh4"
    }
    fn target(&self) -> &'static str {
        "QHC"
    }
    fn apply(&self, f: &Formula, sig: &Signature) -> Result<Formula, TranslateError> {
        typecheck(f, sig)?;
        embed_qh4(f)
    }
}

/// All interpretations, addressable by name.
pub fn registry() -> Vec<Box<dyn Interpretation>> {
    vec![
        Box::new(BoxInterp),
        Box::new(NegNegInterp),
        Box::new(NablaInterp),
        Box::new(DiamondInterp),
        Box::new(EmbedQs4),
        Box::new(EmbedQh4),
    ]
}

pub fn lookup(name: &str) -> Option<Box<dyn Interpretation>> {
    registry().into_iter().find(|i| i.name() == name)
}
