//! The proof kernel.
//!
//! Checks Hilbert-style proofs line by line. A line is justified by a
//! hypothesis, an axiom instance, modus ponens, generalization, a table
//! rule of the calculus, a previously certified derived rule, or a
//! previously certified law (lemma). The kernel is the only component
//! that may declare something a theorem.
//!
//! Hypothesis discipline: generalization never applies to a variable
//! with a free occurrence in a hypothesis. Derived results are certified
//! with frozen metavariables; citing them instantiates the frozen atoms,
//! which is admissible as long as the instantiating formulas stay clear
//! of the eigenvariables of the certified derivation (checked here, and
//! re-checked wholesale by lemma inlining).

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::calculi::{Calculus, CalculusRegistry, RuleSchema};
use crate::formula::{Formula, Signature};
use crate::parser::Surface;
use crate::printer::pretty;
use crate::schema::{match_schema, Binding, BoundValue, MetaTable, Schema};

/// A binding as written in a script: values are unelaborated until the
/// target schema (and with it each metavariable's kind) is known.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBind {
    pub meta: String,
    pub params: Vec<String>,
    pub value: Surface,
}

/// How a citation fixes the metavariables of its target schema.
#[derive(Debug, Clone, PartialEq)]
pub enum Binds {
    /// No binding written; infer one by matching.
    Infer,
    /// As written in the script.
    Raw(Vec<RawBind>),
    /// Already resolved (produced by lemma inlining).
    Given(Binding),
}

impl Binds {
    pub fn from_raw(raw: Vec<RawBind>) -> Binds {
        if raw.is_empty() {
            Binds::Infer
        } else {
            Binds::Raw(raw)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Justification {
    Hypothesis(usize),
    Axiom {
        name: String,
        binding: Binds,
    },
    ModusPonens {
        implication: usize,
        antecedent: usize,
    },
    Generalization {
        from: usize,
        var: String,
    },
    Rule {
        name: String,
        premises: Vec<usize>,
        binding: Binds,
    },
    Lemma {
        id: String,
        binding: Binds,
    },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Hypothesis(k) => write!(f, "hyp {}", k + 1),
            Justification::Axiom { name, .. } => write!(f, "axiom {name}"),
            Justification::ModusPonens {
                implication,
                antecedent,
            } => write!(f, "mp {} {}", implication + 1, antecedent + 1),
            Justification::Generalization { from, var } => write!(f, "gen {} {var}", from + 1),
            Justification::Rule { name, premises, .. } => {
                write!(f, "rule {name}")?;
                for p in premises {
                    write!(f, " {}", p + 1)?;
                }
                Ok(())
            }
            Justification::Lemma { id, .. } => write!(f, "lemma {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

/// A proof object: hypotheses, lines, and the goal (which must equal the
/// final line).
#[derive(Debug, Clone, PartialEq)]
pub struct Proof {
    pub calculus: String,
    pub signature: Signature,
    pub hypotheses: Vec<Formula>,
    pub lines: Vec<ProofLine>,
    pub goal: Formula,
}

/// Why a proof was rejected; `line` is 1-based when the failure is tied
/// to a specific line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejection {
    pub line: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

pub type CheckResult = Result<(), Rejection>;

/// A certified statement, produced by the kernel and stored in the
/// corpus registry. `premises` is empty for laws.
#[derive(Debug, Clone, PartialEq)]
pub struct Certified {
    pub id: String,
    pub calculus: String,
    pub metas: MetaTable,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    /// Variables that occur bound (or as generalization targets) in the
    /// certified derivation; instantiations must avoid them.
    pub eigenvars: BTreeSet<String>,
}

/// Source of previously certified statements.
pub trait Resolver {
    fn resolve(&self, id: &str) -> Option<&Certified>;
}

/// A resolver with nothing in it.
pub struct EmptyResolver;

impl Resolver for EmptyResolver {
    fn resolve(&self, _id: &str) -> Option<&Certified> {
        None
    }
}

/// Kernel options. `allowed_axioms`, when set, restricts which axiom
/// names may be cited (used to certify that a derivation stays inside
/// the minimal table).
#[derive(Default)]
pub struct CheckOptions {
    pub allowed_axioms: Option<BTreeSet<String>>,
}

fn reject(line: usize, reason: impl Into<String>) -> Rejection {
    Rejection {
        line: Some(line + 1),
        reason: reason.into(),
    }
}

pub(crate) fn resolve_binding(
    raw: &[RawBind],
    metas: &MetaTable,
    sig: &Signature,
) -> Result<Binding, String> {
    let mut out = Binding::new();
    for rb in raw {
        let kind = metas
            .get(&rb.meta)
            .ok_or_else(|| format!("schema has no metavariable {}", rb.meta))?;
        let value = match kind {
            crate::schema::MetaKind::Term => {
                if !rb.params.is_empty() {
                    return Err(format!("term metavariable {} takes no slots", rb.meta));
                }
                match &rb.value {
                    Surface::Ident(name, args) if args.is_empty() => {
                        BoundValue::Term(crate::formula::Term::var(name.clone()))
                    }
                    _ => return Err(format!("value of {} must be a variable", rb.meta)),
                }
            }
            crate::schema::MetaKind::Formula { .. } => {
                let (f, _) = crate::parser::elaborate(&rb.value, sig)
                    .map_err(|e| format!("value of {}: {e}", rb.meta))?;
                BoundValue::Formula {
                    params: rb.params.clone(),
                    body: f,
                }
            }
        };
        if out.insert(rb.meta.clone(), value).is_some() {
            return Err(format!("metavariable {} bound twice", rb.meta));
        }
    }
    Ok(out)
}

/// Match several schema bodies against concrete formulas under one
/// shared binding.
fn match_many(metas: &MetaTable, patterns: &[&Formula], concrete: &[&Formula]) -> Option<Binding> {
    let mut binding = Binding::new();
    for (p, c) in patterns.iter().zip(concrete) {
        if !crate::schema::match_into(p, metas, c, &mut binding) {
            return None;
        }
    }
    Some(binding)
}

/// Instantiate a schema against a target formula: use the explicit
/// binding when given, otherwise infer one by matching.
fn check_instance(
    metas: &MetaTable,
    body: &Formula,
    binds: &Binds,
    target: &Formula,
    sig: &Signature,
) -> Result<Binding, String> {
    let binding = match binds {
        Binds::Infer => match_schema(body, metas, target)
            .ok_or_else(|| format!("does not match the schema {}", pretty(body)))?,
        Binds::Raw(raw) => {
            // a partial binding is completed by matching the target
            let mut b = resolve_binding(raw, metas, sig)?;
            crate::schema::match_into(body, metas, target, &mut b);
            b
        }
        Binds::Given(b) => b.clone(),
    };
    let schema = Schema::new(metas.clone(), body.clone());
    let inst = schema
        .instantiate(&binding, sig)
        .map_err(|e| e.to_string())?;
    if &inst != target {
        return Err(format!(
            "instance is {}, line says {}",
            pretty(&inst),
            pretty(target)
        ));
    }
    Ok(binding)
}

/// Guard for citing a certified statement: the instantiation must not
/// touch the derivation's eigenvariables, and neither may the ambient
/// hypotheses.
fn check_eigen(cert: &Certified, binding: &Binding, hypotheses: &[Formula]) -> Result<(), String> {
    if cert.eigenvars.is_empty() {
        return Ok(());
    }
    for h in hypotheses {
        for v in h.free_vars() {
            if cert.eigenvars.contains(&v) {
                return Err(format!(
                    "hypothesis has {v} free, an eigenvariable of {}",
                    cert.id
                ));
            }
        }
    }
    for (name, value) in binding {
        if let BoundValue::Formula { params, body } = value {
            for v in body.free_vars() {
                if !params.contains(&v) && cert.eigenvars.contains(&v) {
                    return Err(format!(
                        "binding for {name} has {v} free, an eigenvariable of {}",
                        cert.id
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Check a proof against its calculus. Every line must typecheck, fit
/// the calculus language, and be justified; the last line must equal the
/// goal.
pub fn check(
    proof: &Proof,
    registry: &CalculusRegistry,
    resolver: &dyn Resolver,
    options: &CheckOptions,
) -> CheckResult {
    let calculus = registry.get(&proof.calculus).map_err(|e| Rejection {
        line: None,
        reason: e.to_string(),
    })?;
    let sig = &proof.signature;
    for (k, h) in proof.hypotheses.iter().enumerate() {
        calculus.discipline.admits(h, sig).map_err(|e| Rejection {
            line: None,
            reason: format!("hypothesis {}: {e}", k + 1),
        })?;
    }
    if proof.lines.is_empty() {
        return Err(Rejection {
            line: None,
            reason: "proof has no lines".into(),
        });
    }
    for (i, line) in proof.lines.iter().enumerate() {
        calculus
            .discipline
            .admits(&line.formula, sig)
            .map_err(|e| reject(i, e))?;
        check_line(proof, calculus, registry, resolver, options, i)?;
    }
    let last = &proof.lines.last().unwrap().formula;
    if last != &proof.goal {
        return Err(Rejection {
            line: Some(proof.lines.len()),
            reason: format!(
                "final line {} does not match the goal {}",
                pretty(last),
                pretty(&proof.goal)
            ),
        });
    }
    Ok(())
}

fn check_line(
    proof: &Proof,
    calculus: &Calculus,
    registry: &CalculusRegistry,
    resolver: &dyn Resolver,
    options: &CheckOptions,
    i: usize,
) -> CheckResult {
    let sig = &proof.signature;
    let line = &proof.lines[i];
    let before = |j: usize| -> Result<&Formula, Rejection> {
        if j < i {
            Ok(&proof.lines[j].formula)
        } else {
            Err(reject(
                i,
                format!("reference to line {} is not strictly earlier", j + 1),
            ))
        }
    };
    match &line.justification {
        Justification::Hypothesis(k) => {
            let h = proof
                .hypotheses
                .get(*k)
                .ok_or_else(|| reject(i, format!("no hypothesis {}", k + 1)))?;
            if h != &line.formula {
                return Err(reject(i, format!("hypothesis {} is {}", k + 1, pretty(h))));
            }
            Ok(())
        }
        Justification::Axiom { name, binding } => {
            if let Some(allowed) = &options.allowed_axioms {
                if !allowed.contains(name) {
                    return Err(reject(
                        i,
                        format!("axiom {name} is outside the allowed set"),
                    ));
                }
            }
            let schema = calculus.axioms.get(name).ok_or_else(|| {
                reject(i, format!("calculus {} has no axiom {name}", calculus.name))
            })?;
            check_instance(&schema.metas, &schema.body, binding, &line.formula, sig)
                .map_err(|e| reject(i, format!("axiom {name}: {e}")))?;
            Ok(())
        }
        Justification::ModusPonens {
            implication,
            antecedent,
        } => {
            let imp = before(*implication)?;
            let arg = before(*antecedent)?;
            let expected = Formula::imp(arg.clone(), line.formula.clone());
            if imp != &expected {
                return Err(reject(
                    i,
                    format!(
                        "modus ponens needs {} but line {} is {}",
                        pretty(&expected),
                        implication + 1,
                        pretty(imp)
                    ),
                ));
            }
            Ok(())
        }
        Justification::Generalization { from, var } => {
            let base = before(*from)?;
            let expected = Formula::forall(var.clone(), base.clone());
            if line.formula != expected {
                return Err(reject(
                    i,
                    format!(
                        "generalization of line {} over {var} is {}",
                        from + 1,
                        pretty(&expected)
                    ),
                ));
            }
            for (k, h) in proof.hypotheses.iter().enumerate() {
                if h.has_free_var(var) {
                    return Err(reject(
                        i,
                        format!("cannot generalize over {var}: free in hypothesis {}", k + 1),
                    ));
                }
            }
            Ok(())
        }
        Justification::Rule {
            name,
            premises,
            binding,
        } => {
            let cited: Vec<&Formula> = premises
                .iter()
                .map(|p| before(*p))
                .collect::<Result<_, _>>()?;
            if let Some(rule) = calculus.rules.get(name) {
                apply_rule(rule, &cited, binding, &line.formula, sig)
                    .map_err(|e| reject(i, format!("rule {name}: {e}")))?;
                return Ok(());
            }
            // a certified derived rule
            let cert = resolver
                .resolve(name)
                .ok_or_else(|| reject(i, format!("unknown rule {name}")))?;
            if cert.premises.is_empty() {
                return Err(reject(i, format!("{name} is a law; cite it with lemma")));
            }
            check_subcalculus(cert, calculus, registry).map_err(|e| reject(i, e))?;
            let rule = RuleSchema {
                name: cert.id.clone(),
                metas: cert.metas.clone(),
                premises: cert.premises.clone(),
                conclusion: cert.conclusion.clone(),
            };
            let b = apply_rule(&rule, &cited, binding, &line.formula, sig)
                .map_err(|e| reject(i, format!("rule {name}: {e}")))?;
            check_eigen(cert, &b, &proof.hypotheses).map_err(|e| reject(i, e))?;
            Ok(())
        }
        Justification::Lemma { id, binding } => {
            let cert = resolver
                .resolve(id)
                .ok_or_else(|| reject(i, format!("unknown lemma {id}")))?;
            if !cert.premises.is_empty() {
                return Err(reject(i, format!("{id} is a rule; cite it with rule")));
            }
            check_subcalculus(cert, calculus, registry).map_err(|e| reject(i, e))?;
            let b = check_instance(&cert.metas, &cert.conclusion, binding, &line.formula, sig)
                .map_err(|e| reject(i, format!("lemma {id}: {e}")))?;
            check_eigen(cert, &b, &proof.hypotheses).map_err(|e| reject(i, e))?;
            Ok(())
        }
    }
}

fn check_subcalculus(
    cert: &Certified,
    calculus: &Calculus,
    registry: &CalculusRegistry,
) -> Result<(), String> {
    if cert.calculus == calculus.name {
        return Ok(());
    }
    let home = registry.get(&cert.calculus).map_err(|e| e.to_string())?;
    if home.included_in(calculus) {
        Ok(())
    } else {
        Err(format!(
            "{} was certified in {}, which is not contained in {}",
            cert.id, cert.calculus, calculus.name
        ))
    }
}

fn apply_rule(
    rule: &RuleSchema,
    cited: &[&Formula],
    binds: &Binds,
    conclusion: &Formula,
    sig: &Signature,
) -> Result<Binding, String> {
    if cited.len() != rule.premises.len() {
        return Err(format!(
            "expects {} premise(s), got {}",
            rule.premises.len(),
            cited.len()
        ));
    }
    let binding = match binds {
        Binds::Infer => {
            let patterns: Vec<&Formula> = rule.premises.iter().collect();
            match_many(&rule.metas, &patterns, cited)
                .ok_or_else(|| "premises do not match".to_string())?
        }
        Binds::Raw(raw) => {
            // a partial binding is completed by matching the premises
            let mut b = resolve_binding(raw, &rule.metas, sig)?;
            for (pattern, citation) in rule.premises.iter().zip(cited) {
                crate::schema::match_into(pattern, &rule.metas, citation, &mut b);
            }
            b
        }
        Binds::Given(b) => b.clone(),
    };
    for (k, (pattern, citation)) in rule.premises.iter().zip(cited).enumerate() {
        let schema = Schema::new(rule.metas.clone(), pattern.clone());
        let inst = schema
            .instantiate(&binding, sig)
            .map_err(|e| e.to_string())?;
        if &inst != *citation {
            return Err(format!(
                "premise {} instantiates to {}, cited line is {}",
                k + 1,
                pretty(&inst),
                pretty(citation)
            ));
        }
    }
    let schema = Schema::new(rule.metas.clone(), rule.conclusion.clone());
    let inst = schema
        .instantiate(&binding, sig)
        .map_err(|e| e.to_string())?;
    if &inst != conclusion {
        return Err(format!(
            "conclusion instantiates to {}, line says {}",
            pretty(&inst),
            pretty(conclusion)
        ));
    }
    Ok(binding)
}

/// Variables that the certified derivation treats as its own: anything
/// bound anywhere in the proof, plus all generalization targets.
pub fn eigenvars_of(proof: &Proof) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut collect = |f: &Formula| collect_binders(f, &mut out);
    for h in &proof.hypotheses {
        collect(h);
    }
    for line in &proof.lines {
        collect_binders(&line.formula, &mut out);
        if let Justification::Generalization { var, .. } = &line.justification {
            out.insert(var.clone());
        }
    }
    out
}

fn collect_binders(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(..) | Formula::FalseC | Formula::FalseI => {}
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            collect_binders(l, out);
            collect_binders(r, out);
        }
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            out.insert(v.clone());
            collect_binders(b, out);
        }
        Formula::Wn(g) | Formula::Oc(g) => collect_binders(g, out),
    }
}

/// Certify a schematic statement: freeze its metavariables as atoms,
/// install the premises as hypotheses, check the proof, and wrap the
/// result. Acceptance certifies the statement for *all* instances,
/// because substituting formulas for the frozen atoms (away from the
/// eigenvariables) maps each justified line to a justified line.
#[allow(clippy::too_many_arguments)]
pub fn check_derived(
    id: &str,
    calculus_name: &str,
    metas: &MetaTable,
    premises: &[Formula],
    conclusion: &Formula,
    lines: Vec<ProofLine>,
    registry: &CalculusRegistry,
    resolver: &dyn Resolver,
    options: &CheckOptions,
) -> Result<Certified, Rejection> {
    let proof = Proof {
        calculus: calculus_name.to_string(),
        signature: metas.as_signature(),
        hypotheses: premises.to_vec(),
        lines,
        goal: conclusion.clone(),
    };
    check(&proof, registry, resolver, options)?;
    Ok(Certified {
        id: id.to_string(),
        calculus: calculus_name.to_string(),
        metas: metas.clone(),
        premises: premises.to_vec(),
        conclusion: conclusion.clone(),
        eigenvars: eigenvars_of(&proof),
    })
}
