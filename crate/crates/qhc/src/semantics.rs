//! Propositional decision procedures and finite Kripke models.
//!
//! `decide_s4` is a tableau for propositional S4 with ancestor
//! loop-checking: worlds are materialized only on unfulfilled `~box`
//! demands, boxes are inherited by children (transitivity) and unboxed
//! locally (reflexivity), and a child whose demand set equals an
//! ancestor's is closed by a back edge. Returned countermodels are
//! verified by `model_check` before being handed out.
//!
//! `decide_ipc` decides the modality-free problem fragment through the
//! box translation. `refute_qhc` tries the box channel and then the
//! double-negation channel; either invalid image certifies that the
//! input is not a theorem. Silence (`Unknown`) certifies nothing.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{typecheck, Formula, Signature, Sort};
use crate::printer::pretty;
use crate::translate::{box_translate, negneg_translate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("atom {0} has no valuation in the model")]
    UnknownAtom(String),
    #[error("input must be propositional (no quantifiers, no term arguments)")]
    NonPropositionalInput,
    #[error("input is outside the S4 fragment: {0}")]
    NotInS4Fragment(String),
    #[error("input must be a modality-free problem formula")]
    NotIpcInput,
    #[error("relation is not reflexive and transitive")]
    NotAnS4Frame,
    #[error("internal: {0}")]
    Internal(String),
}

/// A finite S4 model: worlds `0..worlds`, a reflexive-transitive
/// relation, and a valuation for each atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KripkeModel {
    pub worlds: usize,
    pub relation: Vec<(usize, usize)>,
    pub valuation: BTreeMap<String, Vec<usize>>,
}

impl KripkeModel {
    pub fn validate(&self) -> Result<(), SemanticsError> {
        if self.worlds > 64 {
            return Err(SemanticsError::Internal("more than 64 worlds".into()));
        }
        let succ = self.successor_masks();
        for w in 0..self.worlds {
            if succ[w] & (1 << w) == 0 {
                return Err(SemanticsError::NotAnS4Frame);
            }
            // successors of successors must already be successors
            let mut all = succ[w];
            let mut m = succ[w];
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                all |= succ[v];
            }
            if all != succ[w] {
                return Err(SemanticsError::NotAnS4Frame);
            }
        }
        Ok(())
    }

    fn successor_masks(&self) -> Vec<u64> {
        let mut succ = vec![0u64; self.worlds];
        for &(a, b) in &self.relation {
            if a < self.worlds && b < self.worlds {
                succ[a] |= 1 << b;
            }
        }
        succ
    }

    fn atom_mask(&self, name: &str) -> Option<u64> {
        self.valuation.get(name).map(|ws| {
            let mut m = 0u64;
            for &w in ws {
                if w < self.worlds {
                    m |= 1 << w;
                }
            }
            m
        })
    }
}

/// Evaluate an S4-fragment proposition in a model; returns the set of
/// worlds where it holds.
pub fn model_check(model: &KripkeModel, f: &Formula) -> Result<Vec<usize>, SemanticsError> {
    if model.worlds > 64 {
        return Err(SemanticsError::Internal("more than 64 worlds".into()));
    }
    model.validate()?;
    let succ = model.successor_masks();
    let mask = eval_mask(model, &succ, f)?;
    Ok((0..model.worlds).filter(|w| mask & (1 << w) != 0).collect())
}

fn eval_mask(model: &KripkeModel, succ: &[u64], f: &Formula) -> Result<u64, SemanticsError> {
    let full: u64 = if model.worlds == 64 {
        !0
    } else {
        (1u64 << model.worlds) - 1
    };
    match f {
        Formula::Atom(name, args) => {
            if !args.is_empty() {
                return Err(SemanticsError::NonPropositionalInput);
            }
            model
                .atom_mask(name)
                .ok_or_else(|| SemanticsError::UnknownAtom(name.clone()))
        }
        Formula::FalseC => Ok(0),
        Formula::And(l, r) => Ok(eval_mask(model, succ, l)? & eval_mask(model, succ, r)?),
        Formula::Or(l, r) => Ok(eval_mask(model, succ, l)? | eval_mask(model, succ, r)?),
        Formula::Imp(l, r) => Ok((!eval_mask(model, succ, l)? & full) | eval_mask(model, succ, r)?),
        Formula::Wn(inner) => match inner.as_ref() {
            Formula::Oc(p) => {
                let pm = eval_mask(model, succ, p)?;
                let mut out = 0u64;
                for (w, mask) in succ.iter().enumerate().take(model.worlds) {
                    if mask & !pm == 0 {
                        out |= 1 << w;
                    }
                }
                Ok(out)
            }
            _ => Err(SemanticsError::NotInS4Fragment(pretty(f))),
        },
        Formula::FalseI | Formula::Oc(..) => Err(SemanticsError::NotInS4Fragment(pretty(f))),
        Formula::Forall(..) | Formula::Exists(..) => Err(SemanticsError::NonPropositionalInput),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum S4Verdict {
    Valid,
    Countermodel { model: KripkeModel, world: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum IpcVerdict {
    Valid,
    /// Witness: an S4 countermodel to the box image, with the image and
    /// the world where it fails.
    Invalid {
        image: Formula,
        model: KripkeModel,
        world: usize,
    },
}

// ---------------------------------------------------------------------
// negation normal form over a hash-consed arena

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Nnf {
    Top,
    Bot,
    Lit { atom: u32, neg: bool },
    And(u32, u32),
    Or(u32, u32),
    Box(u32),
    Dia(u32),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Nnf>,
    dedup: std::collections::HashMap<Nnf, u32>,
    atoms: Vec<String>,
    atom_ids: std::collections::HashMap<String, u32>,
}

impl Arena {
    fn intern(&mut self, n: Nnf) -> u32 {
        if let Some(&id) = self.dedup.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.dedup.insert(n, id);
        id
    }

    fn atom(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.atom_ids.get(name) {
            return id;
        }
        let id = self.atoms.len() as u32;
        self.atoms.push(name.to_string());
        self.atom_ids.insert(name.to_string(), id);
        id
    }

    /// Complements for every node (closing the arena under negation).
    fn neg_table(&mut self) -> Vec<u32> {
        let mut table: Vec<u32> = Vec::new();
        let mut i = 0usize;
        while i < self.nodes.len() {
            let n = self.negate(i as u32);
            if table.len() <= i {
                table.resize(i + 1, u32::MAX);
            }
            table[i] = n;
            i += 1;
        }
        table.resize(self.nodes.len(), u32::MAX);
        for i in 0..table.len() {
            let n = table[i];
            if n != u32::MAX && table[n as usize] == u32::MAX {
                table[n as usize] = i as u32;
            }
        }
        table
    }

    /// The interned complement of a node.
    fn negate(&mut self, id: u32) -> u32 {
        let node = self.nodes[id as usize];
        let neg = match node {
            Nnf::Top => Nnf::Bot,
            Nnf::Bot => Nnf::Top,
            Nnf::Lit { atom, neg } => Nnf::Lit { atom, neg: !neg },
            Nnf::And(l, r) => {
                let nl = self.negate(l);
                let nr = self.negate(r);
                Nnf::Or(nl, nr)
            }
            Nnf::Or(l, r) => {
                let nl = self.negate(l);
                let nr = self.negate(r);
                Nnf::And(nl, nr)
            }
            Nnf::Box(x) => {
                let nx = self.negate(x);
                Nnf::Dia(nx)
            }
            Nnf::Dia(x) => {
                let nx = self.negate(x);
                Nnf::Box(nx)
            }
        };
        self.intern(neg)
    }

    /// NNF of `f` (when `positive`) or of its negation.
    fn of_formula(&mut self, f: &Formula, positive: bool) -> Result<u32, SemanticsError> {
        let node = match f {
            Formula::Atom(name, args) => {
                if !args.is_empty() {
                    return Err(SemanticsError::NonPropositionalInput);
                }
                let atom = self.atom(name);
                Nnf::Lit {
                    atom,
                    neg: !positive,
                }
            }
            Formula::FalseC => {
                if positive {
                    Nnf::Bot
                } else {
                    Nnf::Top
                }
            }
            Formula::And(l, r) => {
                let a = self.of_formula(l, positive)?;
                let b = self.of_formula(r, positive)?;
                if positive {
                    Nnf::And(a, b)
                } else {
                    Nnf::Or(a, b)
                }
            }
            Formula::Or(l, r) => {
                let a = self.of_formula(l, positive)?;
                let b = self.of_formula(r, positive)?;
                if positive {
                    Nnf::Or(a, b)
                } else {
                    Nnf::And(a, b)
                }
            }
            Formula::Imp(l, r) => {
                let a = self.of_formula(l, !positive)?;
                let b = self.of_formula(r, positive)?;
                if positive {
                    Nnf::Or(a, b)
                } else {
                    Nnf::And(a, b)
                }
            }
            Formula::Wn(inner) => match inner.as_ref() {
                Formula::Oc(p) => {
                    let body = self.of_formula(p, positive)?;
                    if positive {
                        Nnf::Box(body)
                    } else {
                        Nnf::Dia(body)
                    }
                }
                _ => return Err(SemanticsError::NotInS4Fragment(pretty(f))),
            },
            Formula::FalseI | Formula::Oc(..) => {
                return Err(SemanticsError::NotInS4Fragment(pretty(f)))
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                return Err(SemanticsError::NonPropositionalInput)
            }
        };
        Ok(self.intern(node))
    }
}

// a set of arena node ids
#[derive(Clone, PartialEq, Eq)]
struct IdSet {
    words: Vec<u64>,
}

impl IdSet {
    fn new(capacity: usize) -> Self {
        IdSet {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    fn insert(&mut self, id: u32) -> bool {
        let w = (id / 64) as usize;
        let bit = 1u64 << (id % 64);
        let fresh = self.words[w] & bit == 0;
        self.words[w] |= bit;
        fresh
    }

    fn contains(&self, id: u32) -> bool {
        self.words[(id / 64) as usize] & (1u64 << (id % 64)) != 0
    }
}

#[derive(Clone)]
struct Node {
    todo: Vec<u32>,
    // disjunctions are deferred until the linear rules are exhausted
    ors: Vec<u32>,
    present: IdSet,
    pos_atoms: u64,
    neg_atoms: u64,
    boxes: Vec<u32>, // Box(x) node ids, inherited by children
    dias: Vec<u32>,  // bodies of unfulfilled diamonds
}

impl Node {
    fn from_core(core: &[u32], capacity: usize) -> Self {
        let mut n = Node {
            todo: Vec::new(),
            ors: Vec::new(),
            present: IdSet::new(capacity),
            pos_atoms: 0,
            neg_atoms: 0,
            boxes: Vec::new(),
            dias: Vec::new(),
        };
        for &id in core {
            if n.present.insert(id) {
                n.todo.push(id);
            }
        }
        n
    }

    fn add(&mut self, id: u32) {
        if self.present.insert(id) {
            self.todo.push(id);
        }
    }
}

struct Search<'a> {
    arena: &'a Arena,
    /// complement of each arena node, for semantic branching
    neg: &'a [u32],
    // worlds under construction: positive atom mask per world
    world_atoms: Vec<u64>,
    edges: Vec<(usize, usize)>,
    /// demand sets already known to be unsatisfiable. Satisfiability of
    /// a set is absolute, and ancestor blocking can only ever help a
    /// branch succeed, so a failed solve certifies unsatisfiability and
    /// may be reused under any ancestry.
    unsat: std::collections::HashSet<Vec<u32>>,
    steps: usize,
}

const STEP_LIMIT: usize = 50_000_000;

impl<'a> Search<'a> {
    /// Try to satisfy `core`; on success return the world realizing it.
    fn solve(
        &mut self,
        core: Vec<u32>,
        stack: &mut Vec<(Vec<u32>, usize)>,
    ) -> Result<Option<usize>, SemanticsError> {
        if self.unsat.contains(&core) {
            return Ok(None);
        }
        let node = Node::from_core(&core, self.arena.nodes.len());
        let result = self.saturate(node, core.clone(), stack)?;
        if result.is_none() {
            self.unsat.insert(core);
        }
        Ok(result)
    }

    fn saturate(
        &mut self,
        mut node: Node,
        core: Vec<u32>,
        stack: &mut Vec<(Vec<u32>, usize)>,
    ) -> Result<Option<usize>, SemanticsError> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err(SemanticsError::Internal(
                "tableau step limit exceeded".into(),
            ));
        }
        loop {
            while let Some(id) = node.todo.pop() {
                // clash with an already present complement closes the branch
                if node.present.contains(self.neg[id as usize]) {
                    return Ok(None);
                }
                match self.arena.nodes[id as usize] {
                    Nnf::Top => {}
                    Nnf::Bot => return Ok(None),
                    Nnf::Lit { atom, neg } => {
                        let bit = 1u64 << atom;
                        if neg {
                            if node.pos_atoms & bit != 0 {
                                return Ok(None);
                            }
                            node.neg_atoms |= bit;
                        } else {
                            if node.neg_atoms & bit != 0 {
                                return Ok(None);
                            }
                            node.pos_atoms |= bit;
                        }
                    }
                    Nnf::And(l, r) => {
                        node.add(l);
                        node.add(r);
                    }
                    Nnf::Or(..) => node.ors.push(id),
                    Nnf::Box(x) => {
                        node.boxes.push(id);
                        node.add(x); // reflexivity
                    }
                    Nnf::Dia(x) => node.dias.push(x),
                }
            }
            // unit propagation: drop satisfied disjunctions, fire one
            // whose other disjunct is already refuted
            let mut unit: Option<u32> = None;
            let arena = self.arena;
            let neg = self.neg;
            let Node { ors, present, .. } = &mut node;
            ors.retain(|&or_id| {
                if unit.is_some() {
                    return true;
                }
                let Nnf::Or(l, r) = arena.nodes[or_id as usize] else {
                    unreachable!()
                };
                if present.contains(l) || present.contains(r) {
                    return false; // satisfied
                }
                if present.contains(neg[l as usize]) {
                    unit = Some(r);
                    return false;
                }
                if present.contains(neg[r as usize]) {
                    unit = Some(l);
                    return false;
                }
                true
            });
            if let Some(u) = unit {
                node.add(u);
                continue;
            }
            let Some(&or_id) = node.ors.last() else { break };
            node.ors.pop();
            let Nnf::Or(l, r) = self.arena.nodes[or_id as usize] else {
                unreachable!()
            };
            let checkpoint = (self.world_atoms.len(), self.edges.len(), stack.len());
            let mut left = node.clone();
            left.add(l);
            if let Some(w) = self.saturate(left, core.clone(), stack)? {
                return Ok(Some(w));
            }
            self.world_atoms.truncate(checkpoint.0);
            self.edges.truncate(checkpoint.1);
            stack.truncate(checkpoint.2);
            // semantic branching: the right branch records that the left
            // disjunct failed
            node.add(self.neg[l as usize]);
            node.add(r);
        }
        // saturated and open: materialize the world
        let w = self.world_atoms.len();
        self.world_atoms.push(node.pos_atoms);
        self.edges.push((w, w));
        stack.push((core, w));
        for &psi in &node.dias {
            let mut child: Vec<u32> = Vec::with_capacity(node.boxes.len() + 1);
            child.push(psi);
            child.extend_from_slice(&node.boxes);
            child.sort_unstable();
            child.dedup();
            if let Some((_, target)) = stack.iter().find(|(c, _)| *c == child) {
                let t = *target;
                self.edges.push((w, t));
                continue;
            }
            match self.solve(child, stack)? {
                Some(v) => self.edges.push((w, v)),
                None => {
                    stack.pop();
                    return Ok(None);
                }
            }
        }
        stack.pop();
        Ok(Some(w))
    }
}

/// Decide propositional S4 validity. Countermodels are self-certifying:
/// they are re-checked by `model_check` before being returned.
pub fn decide_s4(f: &Formula) -> Result<S4Verdict, SemanticsError> {
    if !f.is_propositional() {
        return Err(SemanticsError::NonPropositionalInput);
    }
    let mut arena = Arena::default();
    let root = arena.of_formula(f, false)?; // satisfy the negation
    let neg = arena.neg_table();
    let mut search = Search {
        arena: &arena,
        neg: &neg,
        world_atoms: Vec::new(),
        edges: Vec::new(),
        unsat: std::collections::HashSet::new(),
        steps: 0,
    };
    let mut stack = Vec::new();
    match search.solve(vec![root], &mut stack)? {
        None => Ok(S4Verdict::Valid),
        Some(world) => {
            let model = close_model(&arena, &search.world_atoms, &search.edges);
            let model = shrink_model(model, f, world);
            let holds = model_check(&model, f)?;
            if holds.contains(&world) {
                return Err(SemanticsError::Internal(format!(
                    "countermodel for {} failed verification",
                    pretty(f)
                )));
            }
            Ok(S4Verdict::Countermodel { model, world })
        }
    }
}

fn close_model(arena: &Arena, world_atoms: &[u64], edges: &[(usize, usize)]) -> KripkeModel {
    let n = world_atoms.len();
    let mut succ = vec![0u64; n];
    for &(a, b) in edges {
        succ[a] |= 1 << b;
    }
    // reflexive-transitive closure
    for (w, mask) in succ.iter_mut().enumerate() {
        *mask |= 1 << w;
    }
    loop {
        let mut changed = false;
        for w in 0..n {
            let mut add = 0u64;
            let mut m = succ[w];
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                add |= succ[v];
            }
            if add & !succ[w] != 0 {
                succ[w] |= add;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut relation = Vec::new();
    for (w, mask) in succ.iter().enumerate() {
        for v in 0..n {
            if mask & (1 << v) != 0 {
                relation.push((w, v));
            }
        }
    }
    let mut valuation = BTreeMap::new();
    for (i, name) in arena.atoms.iter().enumerate() {
        let holds: Vec<usize> = (0..n).filter(|&w| world_atoms[w] & (1 << i) != 0).collect();
        valuation.insert(name.clone(), holds);
    }
    KripkeModel {
        worlds: n,
        relation,
        valuation,
    }
}

/// Greedily drop worlds while the formula still fails at `world`.
fn shrink_model(mut model: KripkeModel, f: &Formula, world: usize) -> KripkeModel {
    loop {
        let mut improved = false;
        for victim in (0..model.worlds).rev() {
            if victim == world {
                continue;
            }
            let candidate = remove_world(&model, victim);
            if let Ok(holds) = model_check(&candidate, f) {
                let new_world = if world > victim { world - 1 } else { world };
                if !holds.contains(&new_world) {
                    model = candidate;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return model;
        }
    }
}

fn remove_world(model: &KripkeModel, victim: usize) -> KripkeModel {
    let remap = |w: usize| if w > victim { w - 1 } else { w };
    let relation = model
        .relation
        .iter()
        .filter(|(a, b)| *a != victim && *b != victim)
        .map(|&(a, b)| (remap(a), remap(b)))
        .collect();
    let valuation = model
        .valuation
        .iter()
        .map(|(k, ws)| {
            (
                k.clone(),
                ws.iter()
                    .filter(|&&w| w != victim)
                    .map(|&w| remap(w))
                    .collect(),
            )
        })
        .collect();
    KripkeModel {
        worlds: model.worlds - 1,
        relation,
        valuation,
    }
}

/// Decide intuitionistic validity of a modality-free propositional
/// problem formula, via the box translation.
pub fn decide_ipc(f: &Formula, sig: &Signature) -> Result<IpcVerdict, SemanticsError> {
    if !f.is_propositional() {
        return Err(SemanticsError::NonPropositionalInput);
    }
    if !f.is_modality_free() {
        return Err(SemanticsError::NotIpcInput);
    }
    match typecheck(f, sig) {
        Ok(Sort::Problem) => {}
        _ => return Err(SemanticsError::NotIpcInput),
    }
    let image = box_translate(f, sig);
    match decide_s4(&image)? {
        S4Verdict::Valid => Ok(IpcVerdict::Valid),
        S4Verdict::Countermodel { model, world } => Ok(IpcVerdict::Invalid {
            image,
            model,
            world,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Box,
    NegNeg,
}

fn ser_pretty<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&pretty(f))
}

/// A certificate of non-theoremhood: the channel image is false at
/// `world` in `countermodel` (checked against the S4 reading in
/// `checked`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refutation {
    pub channel: Channel,
    /// The channel's image of the input formula.
    #[serde(serialize_with = "ser_pretty")]
    pub translated: Formula,
    /// The S4 formula verified against the model (equals `translated`
    /// on the box channel; the box image of it on the double-negation
    /// channel).
    #[serde(serialize_with = "ser_pretty")]
    pub checked: Formula,
    pub countermodel: KripkeModel,
    pub world: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefuteOutcome {
    Refuted(Vec<Refutation>),
    Unknown,
}

/// Try to refute a propositional QHC formula through both channels.
/// With `all_channels` the search does not stop at the first success.
pub fn refute_qhc(
    f: &Formula,
    sig: &Signature,
    all_channels: bool,
) -> Result<RefuteOutcome, SemanticsError> {
    if !f.is_propositional() {
        return Err(SemanticsError::NonPropositionalInput);
    }
    typecheck(f, sig).map_err(|e| SemanticsError::Internal(e.to_string()))?;
    let mut found = Vec::new();

    let box_image = box_translate(f, sig);
    if let S4Verdict::Countermodel { model, world } = decide_s4(&box_image)? {
        found.push(Refutation {
            channel: Channel::Box,
            translated: box_image.clone(),
            checked: box_image.clone(),
            countermodel: model,
            world,
        });
        if !all_channels {
            return Ok(RefuteOutcome::Refuted(found));
        }
    }

    let negneg_image = negneg_translate(f, sig);
    let ipc_sig = sig.retyped(Sort::Problem);
    if let IpcVerdict::Invalid {
        image,
        model,
        world,
    } = decide_ipc(&negneg_image, &ipc_sig)?
    {
        found.push(Refutation {
            channel: Channel::NegNeg,
            translated: negneg_image.clone(),
            checked: image,
            countermodel: model,
            world,
        });
    }

    if found.is_empty() {
        Ok(RefuteOutcome::Unknown)
    } else {
        Ok(RefuteOutcome::Refuted(found))
    }
}
