//! Axiom and rule tables.
//!
//! Five calculi are built in. QH and QC share one Hilbert-style base,
//! instantiated over problems (with `bot`) and over propositions (with
//! `0`); QC additionally has double negation elimination. QS4 puts the
//! `box` laws on top of QC, QH4 puts the `nabla` laws on top of QH, and
//! QHC combines the two bases with the minimal set of mixed laws: the
//! rules (oc.top) p/!p and (wn.top) a/?a together with
//! `?!p -> p`, `a -> !?a`, `!(p->q) -> (!p->!q)`, `?(a->b) -> (?a->?b)`
//! and `~!0`. The once-primary laws for `?` over the other connectives
//! are *not* in the table; they are replayed as corpus lemmas.
//!
//! Calculi are addressable by name through a [`CalculusRegistry`], and
//! theory files may register extensions (`QHC+KSP`, ...) on top of any
//! registered calculus.

use indexmap::IndexMap;
use thiserror::Error;

use crate::formula::{typecheck, Formula, Signature, Sort};
use crate::parser::parse_formula;
use crate::schema::{MetaTable, Schema};

/// Which formulas a calculus may talk about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discipline {
    /// Problems and propositions, `?`/`!` free.
    TwoSorted,
    /// Problems only, no `?`/`!` (QH).
    ProblemOnly,
    /// Propositions only, no `?`/`!` (QC).
    PropositionOnly,
    /// Propositions where `?`/`!` occur only as the `box` pattern (QS4).
    BoxModal,
    /// Problems where `?`/`!` occur only as the `nabla` pattern (QH4).
    NablaModal,
}

impl Discipline {
    pub fn admits(&self, f: &Formula, sig: &Signature) -> Result<(), String> {
        let sort = typecheck(f, sig).map_err(|e| e.to_string())?;
        match self {
            Discipline::TwoSorted => Ok(()),
            Discipline::ProblemOnly => {
                if sort != Sort::Problem {
                    Err("only problems are in the language".into())
                } else if !f.is_modality_free() {
                    Err("? and ! are not in the language".into())
                } else {
                    Ok(())
                }
            }
            Discipline::PropositionOnly => {
                if sort != Sort::Proposition {
                    Err("only propositions are in the language".into())
                } else if !f.is_modality_free() {
                    Err("? and ! are not in the language".into())
                } else {
                    Ok(())
                }
            }
            Discipline::BoxModal => {
                if sort != Sort::Proposition {
                    Err("only propositions are in the language".into())
                } else if !f.in_box_fragment() {
                    Err("? and ! may only occur as the box pattern ?!".into())
                } else {
                    Ok(())
                }
            }
            Discipline::NablaModal => {
                if sort != Sort::Problem {
                    Err("only problems are in the language".into())
                } else if !f.in_nabla_fragment() {
                    Err("? and ! may only occur as the nabla pattern !?".into())
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// An inference rule: premise schemata over shared metavariables and a
/// conclusion. Modus ponens and generalization are native to the kernel
/// and do not appear in tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSchema {
    pub name: String,
    pub metas: MetaTable,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calculus {
    pub name: String,
    pub discipline: Discipline,
    pub axioms: IndexMap<String, Schema>,
    pub rules: IndexMap<String, RuleSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("unknown calculus {0}")]
    UnknownCalculus(String),
    #[error("calculus {0} is already registered")]
    AlreadyRegistered(String),
    #[error("name {0} is already used in the base calculus")]
    NameClash(String),
    #[error("ill-sorted extension item {name}: {reason}")]
    BadItem { name: String, reason: String },
}

impl Calculus {
    /// Extend with extra axioms and rules under a new name; the base is
    /// untouched.
    pub fn extend(
        &self,
        name: impl Into<String>,
        axioms: Vec<(String, Schema)>,
        rules: Vec<RuleSchema>,
    ) -> Result<Calculus, CalculusError> {
        let mut out = self.clone();
        out.name = name.into();
        for (n, schema) in axioms {
            if out.axioms.contains_key(&n) || out.rules.contains_key(&n) {
                return Err(CalculusError::NameClash(n));
            }
            self.discipline
                .admits(&schema.body, &schema.metas.as_signature())
                .map_err(|reason| CalculusError::BadItem {
                    name: n.clone(),
                    reason,
                })?;
            out.axioms.insert(n, schema);
        }
        for rule in rules {
            if out.rules.contains_key(&rule.name) || out.axioms.contains_key(&rule.name) {
                return Err(CalculusError::NameClash(rule.name));
            }
            let sig = rule.metas.as_signature();
            for f in rule
                .premises
                .iter()
                .chain(std::iter::once(&rule.conclusion))
            {
                self.discipline
                    .admits(f, &sig)
                    .map_err(|reason| CalculusError::BadItem {
                        name: rule.name.clone(),
                        reason,
                    })?;
            }
            out.rules.insert(rule.name.clone(), rule);
        }
        Ok(out)
    }

    /// True when every axiom and rule of `self` occurs (same name, same
    /// schema) in `other`; lemmas certified here are then usable there.
    pub fn included_in(&self, other: &Calculus) -> bool {
        self.axioms
            .iter()
            .all(|(n, s)| other.axioms.get(n) == Some(s))
            && self
                .rules
                .iter()
                .all(|(n, r)| other.rules.get(n) == Some(r))
    }
}

fn meta_table(spec: &[(&str, Sort, usize)], terms: &[&str]) -> MetaTable {
    let mut t = MetaTable::new();
    for (name, sort, arity) in spec {
        t.declare_formula(*name, *sort, *arity);
    }
    for name in terms {
        t.declare_term(*name);
    }
    t
}

fn ax(metas: MetaTable, body: &str) -> Schema {
    let sig = metas.as_signature();
    let f = parse_formula(body, &sig).unwrap_or_else(|e| panic!("bad axiom body {body}: {e}"));
    Schema::new(metas, f)
}

fn rule(name: &str, metas: MetaTable, premises: &[&str], conclusion: &str) -> RuleSchema {
    let sig = metas.as_signature();
    let prem = premises
        .iter()
        .map(|s| parse_formula(s, &sig).unwrap_or_else(|e| panic!("bad premise {s}: {e}")))
        .collect();
    let concl = parse_formula(conclusion, &sig)
        .unwrap_or_else(|e| panic!("bad conclusion {conclusion}: {e}"));
    RuleSchema {
        name: name.into(),
        metas,
        premises: prem,
        conclusion: concl,
    }
}

/// The shared propositional/predicate Hilbert base over one sort.
/// `prefix` is `i` for the problem copy and `c` for the proposition copy.
fn hilbert_base(sort: Sort, prefix: &str) -> Vec<(String, Schema)> {
    let m0 = || meta_table(&[("A", sort, 0), ("B", sort, 0), ("C", sort, 0)], &[]);
    let m1t = || meta_table(&[("A", sort, 1)], &["t"]);
    let m1c = || meta_table(&[("A", sort, 1), ("C", sort, 0)], &[]);
    let falsity = match sort {
        Sort::Problem => "bot",
        Sort::Proposition => "0",
    };
    let items: Vec<(&str, Schema)> = vec![
        ("k", ax(m0(), "A -> (B -> A)")),
        ("s", ax(m0(), "(A -> (B -> C)) -> ((A -> B) -> (A -> C))")),
        ("and.el", ax(m0(), "A & B -> A")),
        ("and.er", ax(m0(), "A & B -> B")),
        ("and.i", ax(m0(), "A -> (B -> A & B)")),
        ("or.il", ax(m0(), "A -> A | B")),
        ("or.ir", ax(m0(), "B -> A | B")),
        ("or.e", ax(m0(), "(A -> C) -> ((B -> C) -> (A | B -> C))")),
        ("exfalso", ax(m0(), &format!("{falsity} -> A"))),
        ("all.e", ax(m1t(), "forall x. A(x) -> A(t)")),
        ("ex.i", ax(m1t(), "A(t) -> exists x. A(x)")),
        (
            "all.shift",
            ax(m1c(), "forall x. (C -> A(x)) -> (C -> forall x. A(x))"),
        ),
        (
            "ex.shift",
            ax(m1c(), "forall x. (A(x) -> C) -> (exists x. A(x) -> C)"),
        ),
    ];
    items
        .into_iter()
        .map(|(n, s)| (format!("{prefix}.{n}"), s))
        .collect()
}

fn build_qh() -> Calculus {
    Calculus {
        name: "QH".into(),
        discipline: Discipline::ProblemOnly,
        axioms: hilbert_base(Sort::Problem, "i").into_iter().collect(),
        rules: IndexMap::new(),
    }
}

fn build_qc() -> Calculus {
    let mut axioms: IndexMap<String, Schema> =
        hilbert_base(Sort::Proposition, "c").into_iter().collect();
    axioms.insert(
        "c.dne".into(),
        ax(meta_table(&[("A", Sort::Proposition, 0)], &[]), "~~A -> A"),
    );
    Calculus {
        name: "QC".into(),
        discipline: Discipline::PropositionOnly,
        axioms,
        rules: IndexMap::new(),
    }
}

fn build_qs4() -> Calculus {
    let mut c = build_qc();
    c.name = "QS4".into();
    c.discipline = Discipline::BoxModal;
    let p = || {
        meta_table(
            &[("P", Sort::Proposition, 0), ("Q", Sort::Proposition, 0)],
            &[],
        )
    };
    c.axioms.insert("box.t".into(), ax(p(), "box P -> P"));
    c.axioms
        .insert("box.4".into(), ax(p(), "box P -> box box P"));
    c.axioms
        .insert("box.k".into(), ax(p(), "box (P -> Q) -> (box P -> box Q)"));
    c.rules
        .insert("box.nec".into(), rule("box.nec", p(), &["P"], "box P"));
    c
}

fn build_qh4() -> Calculus {
    let mut c = build_qh();
    c.name = "QH4".into();
    c.discipline = Discipline::NablaModal;
    let a = || meta_table(&[("A", Sort::Problem, 0), ("B", Sort::Problem, 0)], &[]);
    c.axioms.insert("nabla.1".into(), ax(a(), "A -> nabla A"));
    c.axioms
        .insert("nabla.2".into(), ax(a(), "nabla nabla A -> nabla A"));
    c.axioms
        .insert("nabla.3".into(), ax(a(), "nabla bot -> bot"));
    c.axioms.insert(
        "nabla.4".into(),
        ax(a(), "nabla (A -> B) -> (nabla A -> nabla B)"),
    );
    c
}

fn build_qhc() -> Calculus {
    let mut axioms: IndexMap<String, Schema> =
        hilbert_base(Sort::Problem, "i").into_iter().collect();
    for (n, s) in hilbert_base(Sort::Proposition, "c") {
        axioms.insert(n, s);
    }
    axioms.insert(
        "c.dne".into(),
        ax(meta_table(&[("A", Sort::Proposition, 0)], &[]), "~~A -> A"),
    );
    let a2 = || meta_table(&[("A", Sort::Problem, 0), ("B", Sort::Problem, 0)], &[]);
    let p2 = || {
        meta_table(
            &[("P", Sort::Proposition, 0), ("Q", Sort::Proposition, 0)],
            &[],
        )
    };
    axioms.insert("wn.oc".into(), ax(p2(), "?!P -> P"));
    axioms.insert("oc.wn".into(), ax(a2(), "A -> !?A"));
    axioms.insert("oc.imp".into(), ax(p2(), "!(P -> Q) -> (!P -> !Q)"));
    axioms.insert("wn.imp".into(), ax(a2(), "?(A -> B) -> (?A -> ?B)"));
    axioms.insert("oc.bot".into(), ax(MetaTable::new(), "~!0"));
    let mut rules = IndexMap::new();
    rules.insert(
        "wn.top".into(),
        rule(
            "wn.top",
            meta_table(&[("A", Sort::Problem, 0)], &[]),
            &["A"],
            "?A",
        ),
    );
    rules.insert(
        "oc.top".into(),
        rule(
            "oc.top",
            meta_table(&[("P", Sort::Proposition, 0)], &[]),
            &["P"],
            "!P",
        ),
    );
    Calculus {
        name: "QHC".into(),
        discipline: Discipline::TwoSorted,
        axioms,
        rules,
    }
}

pub const BUILTIN_NAMES: &[&str] = &["QC", "QH", "QS4", "QH4", "QHC"];

/// Fetch a builtin table by name.
pub fn builtin(name: &str) -> Result<Calculus, CalculusError> {
    match name {
        "QC" => Ok(build_qc()),
        "QH" => Ok(build_qh()),
        "QS4" => Ok(build_qs4()),
        "QH4" => Ok(build_qh4()),
        "QHC" => Ok(build_qhc()),
        other => Err(CalculusError::UnknownCalculus(other.into())),
    }
}

/// Name-addressable store of calculi: the builtins plus any extensions
/// registered from theory files.
#[derive(Debug, Clone)]
pub struct CalculusRegistry {
    table: IndexMap<String, Calculus>,
}

impl Default for CalculusRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl CalculusRegistry {
    pub fn new() -> Self {
        let mut table = IndexMap::new();
        for name in BUILTIN_NAMES {
            table.insert((*name).to_string(), builtin(name).unwrap());
        }
        CalculusRegistry { table }
    }

    pub fn get(&self, name: &str) -> Result<&Calculus, CalculusError> {
        self.table
            .get(name)
            .ok_or_else(|| CalculusError::UnknownCalculus(name.into()))
    }

    pub fn register(&mut self, calculus: Calculus) -> Result<(), CalculusError> {
        if self.table.contains_key(&calculus.name) {
            return Err(CalculusError::AlreadyRegistered(calculus.name));
        }
        self.table.insert(calculus.name.clone(), calculus);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.table.keys()
    }
}
