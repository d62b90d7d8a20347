//! The corpus: machine-checked derived results, one script file per
//! entry, keyed by a stable identifier.
//!
//! Entries are loaded from a directory (`*.qp`, with calculus extensions
//! declared in `theories/*.qth`), ordered so that lemmas precede their
//! users, and checked by the kernel. A cycle among lemma citations is an
//! error. Checked entries become citable as `lemma <id>` (laws) or
//! `rule <id>` (derived rules).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::calculi::CalculusRegistry;
use crate::formula::{Formula, Signature};
use crate::kernel::{
    self, Binds, Certified, CheckOptions, Justification, Proof, ProofLine, Rejection, Resolver,
};
use crate::schema::{subst_atoms, Binding, BoundValue, MetaTable};
use crate::script::{self, EntryFile, ScriptError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {err}")]
    Script { path: String, err: ScriptError },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("duplicate entry id {0}")]
    DuplicateId(String),
    #[error("cyclic lemma dependency involving {0:?}")]
    CyclicLemmaDependency(Vec<String>),
    #[error("{0}")]
    Calculus(#[from] crate::calculi::CalculusError),
    #[error("entry {id} rejected: {rejection}")]
    Rejected { id: String, rejection: Rejection },
    #[error("unknown entry {0}")]
    UnknownEntry(String),
    #[error("cannot inline {id}: {reason}")]
    Inline { id: String, reason: String },
}

/// A checked corpus entry.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub certified: Certified,
    pub anchor: String,
    pub path: Option<PathBuf>,
    /// The checked derivation over the frozen metavariables.
    pub lines: Vec<ProofLine>,
}

impl CorpusEntry {
    pub fn frozen_proof(&self) -> Proof {
        Proof {
            calculus: self.certified.calculus.clone(),
            signature: self.certified.metas.as_signature(),
            hypotheses: self.certified.premises.clone(),
            lines: self.lines.clone(),
            goal: self.certified.conclusion.clone(),
        }
    }
}

pub struct CorpusRegistry {
    pub calculi: CalculusRegistry,
    entries: IndexMap<String, CorpusEntry>,
}

impl Resolver for CorpusRegistry {
    fn resolve(&self, id: &str) -> Option<&Certified> {
        self.entries.get(id).map(|e| &e.certified)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub accepted: bool,
    pub reason: Option<String>,
    pub micros: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub total: usize,
    pub accepted: usize,
    pub entries: Vec<EntryReport>,
}

impl CorpusReport {
    pub fn all_accepted(&self) -> bool {
        self.accepted == self.total
    }
}

/// Directory with the shipped corpus, resolved relative to this crate.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

impl CorpusRegistry {
    pub fn empty() -> Self {
        CorpusRegistry {
            calculi: CalculusRegistry::new(),
            entries: IndexMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    pub fn get(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries.get(id)
    }

    /// Load and check a corpus directory: theory files first, then all
    /// entries in dependency order (parallel within each level).
    pub fn load_dir(dir: &Path) -> Result<Self, CorpusError> {
        let mut reg = CorpusRegistry::empty();
        let theories_dir = dir.join("theories");
        if theories_dir.is_dir() {
            let mut theory_files: Vec<PathBuf> = std::fs::read_dir(&theories_dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "qth"))
                .collect();
            theory_files.sort();
            let mut pending: Vec<(PathBuf, script::TheoryFile)> = theory_files
                .into_iter()
                .map(|p| {
                    let text = std::fs::read_to_string(&p)?;
                    let t = script::parse_theory(&text).map_err(|err| CorpusError::Script {
                        path: p.display().to_string(),
                        err,
                    })?;
                    Ok((p, t))
                })
                .collect::<Result<_, CorpusError>>()?;
            // theories may extend other theories; register until fixpoint
            loop {
                let before = pending.len();
                let mut rest = Vec::new();
                for (p, t) in pending {
                    if let Ok(base) = reg.calculi.get(&t.base) {
                        let ext = base.extend(t.name.clone(), t.axioms.clone(), t.rules.clone())?;
                        reg.calculi.register(ext)?;
                    } else {
                        rest.push((p, t));
                    }
                }
                pending = rest;
                if pending.is_empty() {
                    break;
                }
                if pending.len() == before {
                    return Err(CorpusError::Script {
                        path: pending[0].0.display().to_string(),
                        err: ScriptError::Other(format!("unknown base {}", pending[0].1.base)),
                    });
                }
            }
        }

        let mut entry_files: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "qp"))
            .collect();
        entry_files.sort();
        let parsed: Vec<(PathBuf, EntryFile)> = entry_files
            .into_par_iter()
            .map(|p| {
                let text = std::fs::read_to_string(&p)?;
                let e = script::parse_entry(&text).map_err(|err| CorpusError::Script {
                    path: p.display().to_string(),
                    err,
                })?;
                Ok((p, e))
            })
            .collect::<Result<_, CorpusError>>()?;
        reg.check_all(parsed)?;
        Ok(reg)
    }

    /// Check a batch of parsed entries in dependency order and install them.
    pub fn check_all(&mut self, parsed: Vec<(PathBuf, EntryFile)>) -> Result<(), CorpusError> {
        let mut by_id: IndexMap<String, (PathBuf, EntryFile)> = IndexMap::new();
        for (p, e) in parsed {
            if by_id.contains_key(&e.id) || self.entries.contains_key(&e.id) {
                return Err(CorpusError::DuplicateId(e.id));
            }
            by_id.insert(e.id.clone(), (p, e));
        }
        // dependency edges: citations of names that are corpus ids
        let mut deps: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (id, (_, e)) in &by_id {
            let calculus = self.calculi.get(&e.calculus).map_err(CorpusError::from)?;
            let mut this = BTreeSet::new();
            for line in &e.lines {
                match &line.justification {
                    Justification::Lemma { id: dep, .. } => {
                        if by_id.contains_key(dep) {
                            this.insert(dep.clone());
                        }
                    }
                    Justification::Rule { name, .. }
                        if !calculus.rules.contains_key(name) && by_id.contains_key(name) =>
                    {
                        this.insert(name.clone());
                    }
                    _ => {}
                }
            }
            deps.insert(id.clone(), this);
        }
        // Kahn layering
        let mut remaining: BTreeSet<String> = by_id.keys().cloned().collect();
        let mut levels: Vec<Vec<String>> = Vec::new();
        while !remaining.is_empty() {
            let ready: Vec<String> = remaining
                .iter()
                .filter(|id| deps[*id].iter().all(|d| !remaining.contains(d)))
                .cloned()
                .collect();
            if ready.is_empty() {
                return Err(CorpusError::CyclicLemmaDependency(
                    remaining.into_iter().collect(),
                ));
            }
            for id in &ready {
                remaining.remove(id);
            }
            levels.push(ready);
        }
        let options = CheckOptions::default();
        for level in levels {
            let results: Vec<(String, Result<Certified, Rejection>)> = level
                .par_iter()
                .map(|id| {
                    let (_, e) = &by_id[id];
                    let r = kernel::check_derived(
                        &e.id,
                        &e.calculus,
                        &e.metas,
                        &e.premises,
                        &e.conclusion,
                        e.lines.clone(),
                        &self.calculi,
                        self,
                        &options,
                    );
                    (id.clone(), r)
                })
                .collect();
            for (id, r) in results {
                let cert = r.map_err(|rejection| CorpusError::Rejected {
                    id: id.clone(),
                    rejection,
                })?;
                let (path, e) = by_id.shift_remove(&id).unwrap();
                self.entries.insert(
                    id,
                    CorpusEntry {
                        certified: cert,
                        anchor: e.anchor,
                        path: Some(path),
                        lines: e.lines,
                    },
                );
            }
        }
        // keep a stable id order for reports
        self.entries.sort_keys();
        Ok(())
    }

    /// Re-check entries (all, or those matching a `*` glob) and report.
    pub fn run(&self, filter: Option<&str>) -> CorpusReport {
        let selected: Vec<&String> = self
            .entries
            .keys()
            .filter(|id| filter.is_none_or(|g| glob_match(g, id)))
            .collect();
        let options = CheckOptions::default();
        let mut reports: Vec<EntryReport> = selected
            .par_iter()
            .map(|id| {
                let entry = &self.entries[*id];
                let start = Instant::now();
                let result = kernel::check(&entry.frozen_proof(), &self.calculi, self, &options);
                let micros = start.elapsed().as_micros();
                EntryReport {
                    id: (*id).clone(),
                    accepted: result.is_ok(),
                    reason: result.err().map(|e| e.to_string()),
                    micros,
                }
            })
            .collect();
        reports.sort_by(|a, b| a.id.cmp(&b.id));
        CorpusReport {
            total: reports.len(),
            accepted: reports.iter().filter(|r| r.accepted).count(),
            entries: reports,
        }
    }

    /// Check an entry and everything it cites, transitively, in a kernel
    /// mode that rejects any axiom outside `allowed`.
    pub fn check_restricted(
        &self,
        id: &str,
        allowed: &BTreeSet<String>,
    ) -> Result<(), CorpusError> {
        let mut seen = BTreeSet::new();
        self.check_restricted_rec(id, allowed, &mut seen)
    }

    fn check_restricted_rec(
        &self,
        id: &str,
        allowed: &BTreeSet<String>,
        seen: &mut BTreeSet<String>,
    ) -> Result<(), CorpusError> {
        if !seen.insert(id.to_string()) {
            return Ok(());
        }
        let entry = self
            .entries
            .get(id)
            .ok_or_else(|| CorpusError::UnknownEntry(id.to_string()))?;
        let options = CheckOptions {
            allowed_axioms: Some(allowed.clone()),
        };
        kernel::check(&entry.frozen_proof(), &self.calculi, self, &options).map_err(
            |rejection| CorpusError::Rejected {
                id: id.to_string(),
                rejection,
            },
        )?;
        let calculus = self.calculi.get(&entry.certified.calculus)?;
        for line in &entry.lines {
            match &line.justification {
                Justification::Lemma { id: dep, .. } => {
                    self.check_restricted_rec(dep, allowed, seen)?
                }
                Justification::Rule { name, .. } if !calculus.rules.contains_key(name) => {
                    self.check_restricted_rec(name, allowed, seen)?
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Fully expand every lemma / derived-rule citation of an entry into
    /// base inferences and return the flattened proof, ready to be fed
    /// back to the kernel.
    pub fn inline_entry(&self, id: &str) -> Result<Proof, CorpusError> {
        let entry = self
            .entries
            .get(id)
            .ok_or_else(|| CorpusError::UnknownEntry(id.to_string()))?;
        let proof = entry.frozen_proof();
        let mut out = Vec::new();
        self.inline_into(&entry.lines, &entry.certified, None, &[], &mut out)?;
        Ok(Proof {
            lines: out,
            ..proof
        })
    }

    /// Expand `lines` (the derivation of `owner`) into `out`, returning
    /// for each original line its index in `out`. When splicing a cited
    /// derivation, `outer` is the citation's resolved binding and
    /// `premise_map` says which `out` lines stand for the hypotheses.
    fn inline_into(
        &self,
        lines: &[ProofLine],
        owner: &Certified,
        outer: Option<&Binding>,
        premise_map: &[usize],
        out: &mut Vec<ProofLine>,
    ) -> Result<Vec<usize>, CorpusError> {
        let ctx = owner.id.clone();
        let err = |reason: String| CorpusError::Inline {
            id: ctx.clone(),
            reason,
        };
        let calculus = self.calculi.get(&owner.calculus)?;
        let frozen_sig = owner.metas.as_signature();
        let mut map: Vec<usize> = Vec::with_capacity(lines.len());
        for line in lines {
            let formula = match outer {
                Some(b) => subst_atoms(&line.formula, b).map_err(|e| err(e.to_string()))?,
                None => line.formula.clone(),
            };
            let new_index = match &line.justification {
                Justification::Hypothesis(k) => {
                    if outer.is_some() {
                        // a cited rule's hypothesis stands for the line
                        // that was cited as that premise
                        *premise_map
                            .get(*k)
                            .ok_or_else(|| err(format!("premise {} unmapped", k + 1)))?
                    } else {
                        out.push(ProofLine {
                            formula,
                            justification: Justification::Hypothesis(*k),
                        });
                        out.len() - 1
                    }
                }
                Justification::ModusPonens {
                    implication,
                    antecedent,
                } => {
                    out.push(ProofLine {
                        formula,
                        justification: Justification::ModusPonens {
                            implication: map[*implication],
                            antecedent: map[*antecedent],
                        },
                    });
                    out.len() - 1
                }
                Justification::Generalization { from, var } => {
                    out.push(ProofLine {
                        formula,
                        justification: Justification::Generalization {
                            from: map[*from],
                            var: var.clone(),
                        },
                    });
                    out.len() - 1
                }
                Justification::Axiom { name, binding } => {
                    let schema = calculus
                        .axioms
                        .get(name)
                        .ok_or_else(|| err(format!("unknown axiom {name}")))?;
                    let binding =
                        self.compose_binds(binding, &schema.metas, &frozen_sig, outer, &ctx)?;
                    out.push(ProofLine {
                        formula,
                        justification: Justification::Axiom {
                            name: name.clone(),
                            binding,
                        },
                    });
                    out.len() - 1
                }
                Justification::Rule {
                    name,
                    premises,
                    binding,
                } => {
                    let cited: Vec<usize> = premises.iter().map(|p| map[*p]).collect();
                    if let Some(rule) = calculus.rules.get(name) {
                        let binding =
                            self.compose_binds(binding, &rule.metas, &frozen_sig, outer, &ctx)?;
                        out.push(ProofLine {
                            formula,
                            justification: Justification::Rule {
                                name: name.clone(),
                                premises: cited,
                                binding,
                            },
                        });
                        out.len() - 1
                    } else {
                        self.splice(
                            name,
                            binding,
                            &cited,
                            &formula,
                            &frozen_sig,
                            outer,
                            out,
                            &ctx,
                        )?
                    }
                }
                Justification::Lemma { id, binding } => {
                    self.splice(id, binding, &[], &formula, &frozen_sig, outer, out, &ctx)?
                }
            };
            map.push(new_index);
        }
        Ok(map)
    }

    /// Expand a citation of `dep` in place; returns the `out` index that
    /// carries the instantiated conclusion.
    #[allow(clippy::too_many_arguments)]
    fn splice(
        &self,
        dep: &str,
        binds: &Binds,
        cited: &[usize],
        conclusion: &Formula,
        frozen_sig: &Signature,
        outer: Option<&Binding>,
        out: &mut Vec<ProofLine>,
        ctx: &str,
    ) -> Result<usize, CorpusError> {
        let err = |reason: String| CorpusError::Inline {
            id: ctx.to_string(),
            reason,
        };
        let dep_entry = self
            .entries
            .get(dep)
            .ok_or_else(|| err(format!("unknown citation {dep}")))?;
        // the citation's binding, with values in the frame of `out`
        let binding: Binding = match binds {
            Binds::Infer => {
                let patterns: Vec<&Formula> = dep_entry
                    .certified
                    .premises
                    .iter()
                    .chain(std::iter::once(&dep_entry.certified.conclusion))
                    .collect();
                let concrete: Vec<Formula> = cited
                    .iter()
                    .map(|i| out[*i].formula.clone())
                    .chain(std::iter::once(conclusion.clone()))
                    .collect();
                let mut b = Binding::new();
                for (p, c) in patterns.iter().zip(&concrete) {
                    if !crate::schema::match_into(p, &dep_entry.certified.metas, c, &mut b) {
                        return Err(err(format!("citation of {dep} does not match")));
                    }
                }
                b
            }
            Binds::Raw(raw) => {
                let inner = kernel::resolve_binding(raw, &dep_entry.certified.metas, frozen_sig)
                    .map_err(err)?;
                match outer {
                    Some(o) => subst_binding(inner, o).map_err(|e| err(e.to_string()))?,
                    None => inner,
                }
            }
            Binds::Given(b) => match outer {
                Some(o) => subst_binding(b.clone(), o).map_err(|e| err(e.to_string()))?,
                None => b.clone(),
            },
        };
        let idx_map = self.inline_into(
            &dep_entry.lines,
            &dep_entry.certified,
            Some(&binding),
            cited,
            out,
        )?;
        idx_map
            .last()
            .copied()
            .ok_or_else(|| err(format!("citation of {dep} expands to nothing")))
    }

    fn compose_binds(
        &self,
        binds: &Binds,
        metas: &MetaTable,
        frozen_sig: &Signature,
        outer: Option<&Binding>,
        ctx: &str,
    ) -> Result<Binds, CorpusError> {
        let err = |reason: String| CorpusError::Inline {
            id: ctx.to_string(),
            reason,
        };
        let inner = match binds {
            Binds::Infer => return Ok(Binds::Infer),
            Binds::Raw(raw) => kernel::resolve_binding(raw, metas, frozen_sig).map_err(err)?,
            Binds::Given(b) => b.clone(),
        };
        match outer {
            Some(o) => Ok(Binds::Given(
                subst_binding(inner, o).map_err(|e| err(e.to_string()))?,
            )),
            None => Ok(Binds::Given(inner)),
        }
    }
}

/// Push a binding's values through an outer frozen-atom substitution.
fn subst_binding(inner: Binding, outer: &Binding) -> Result<Binding, crate::formula::FormulaError> {
    let mut composed = Binding::new();
    for (name, value) in inner {
        let new_value = match value {
            BoundValue::Formula { params, body } => BoundValue::Formula {
                params,
                body: subst_atoms(&body, outer)?,
            },
            BoundValue::Term(t) => match outer.get(&t.0) {
                Some(BoundValue::Term(u)) => BoundValue::Term(u.clone()),
                _ => BoundValue::Term(t),
            },
        };
        composed.insert(name, new_value);
    }
    Ok(composed)
}

/// `*`-wildcard match for the corpus filter.
pub fn glob_match(pattern: &str, s: &str) -> bool {
    fn rec(p: &[u8], s: &[u8]) -> bool {
        match (p.first(), s.first()) {
            (None, None) => true,
            (Some(b'*'), _) => rec(&p[1..], s) || (!s.is_empty() && rec(p, &s[1..])),
            (Some(c), Some(d)) if c == d => rec(&p[1..], &s[1..]),
            _ => false,
        }
    }
    rec(pattern.as_bytes(), s.as_bytes())
}
