//! Text formats: standalone proof scripts, corpus entry files (`.qp`)
//! and theory files (`.qth`). See `docs/formats.md` for the grammar.

use thiserror::Error;

use crate::calculi::RuleSchema;
use crate::formula::{Formula, Signature, Sort};
use crate::kernel::{Binds, Justification, Proof, ProofLine, RawBind};
use crate::parser::{elaborate, lex, parse_surface_stream, ParseError, Token, TokenStream};
use crate::schema::{MetaTable, Schema};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {err}")]
    At { line: usize, err: String },
    #[error("{0}")]
    Other(String),
}

fn at(line: usize, err: impl ToString) -> ScriptError {
    ScriptError::At {
        line,
        err: err.to_string(),
    }
}

/// A parsed corpus entry file, not yet checked.
#[derive(Debug, Clone)]
pub struct EntryFile {
    pub id: String,
    pub calculus: String,
    pub anchor: String,
    pub metas: MetaTable,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub lines: Vec<ProofLine>,
}

/// A parsed theory file: named extension of a base calculus.
#[derive(Debug, Clone)]
pub struct TheoryFile {
    pub name: String,
    pub base: String,
    pub axioms: Vec<(String, Schema)>,
    pub rules: Vec<RuleSchema>,
}

/// Dotted name, segments may be identifiers or numbers: `i.and.el`, `box.2`.
fn parse_name(ts: &mut TokenStream) -> Result<String, ParseError> {
    let mut name = match ts.next_tok()? {
        Token::Ident(s) => s.clone(),
        Token::Num(n) => n.to_string(),
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    };
    while ts.peek() == Some(&Token::Dot) {
        ts.next_tok()?;
        match ts.next_tok()? {
            Token::Ident(s) => {
                name.push('.');
                name.push_str(s);
            }
            Token::Num(n) => {
                name.push('.');
                name.push_str(&n.to_string());
            }
            other => return Err(ParseError::UnexpectedToken(other.to_string())),
        }
    }
    Ok(name)
}

/// Calculus name: identifiers joined by `+`.
fn parse_calc_name(ts: &mut TokenStream) -> Result<String, ParseError> {
    let mut name = match ts.next_tok()? {
        Token::Ident(s) => s.clone(),
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    };
    while ts.peek() == Some(&Token::Plus) {
        ts.next_tok()?;
        match ts.next_tok()? {
            Token::Ident(s) => {
                name.push('+');
                name.push_str(s);
            }
            other => return Err(ParseError::UnexpectedToken(other.to_string())),
        }
    }
    Ok(name)
}

fn parse_num(ts: &mut TokenStream) -> Result<usize, ParseError> {
    match ts.next_tok()? {
        Token::Num(n) => Ok(*n),
        other => Err(ParseError::UnexpectedToken(other.to_string())),
    }
}

fn parse_binds(ts: &mut TokenStream) -> Result<Vec<RawBind>, ParseError> {
    let mut out = Vec::new();
    if ts.peek() != Some(&Token::LBracket) {
        return Ok(out);
    }
    ts.next_tok()?;
    loop {
        let meta = match ts.next_tok()? {
            Token::Ident(s) => s.clone(),
            other => return Err(ParseError::UnexpectedToken(other.to_string())),
        };
        let mut params = Vec::new();
        if ts.peek() == Some(&Token::LParen) {
            ts.next_tok()?;
            loop {
                match ts.next_tok()? {
                    Token::Ident(s) => params.push(s.clone()),
                    other => return Err(ParseError::UnexpectedToken(other.to_string())),
                }
                match ts.next_tok()? {
                    Token::Comma => continue,
                    Token::RParen => break,
                    other => return Err(ParseError::UnexpectedToken(other.to_string())),
                }
            }
        }
        ts.expect(&Token::Assign)?;
        let value = parse_surface_stream(ts)?;
        out.push(RawBind {
            meta,
            params,
            value,
        });
        match ts.next_tok()? {
            Token::Comma => continue,
            Token::RBracket => break,
            other => return Err(ParseError::UnexpectedToken(other.to_string())),
        }
    }
    Ok(out)
}

fn parse_justification(ts: &mut TokenStream) -> Result<Justification, ParseError> {
    let kw = match ts.next_tok()? {
        Token::Ident(s) => s.clone(),
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    };
    let just = match kw.as_str() {
        "hyp" => {
            let k = parse_num(ts)?;
            if k == 0 {
                return Err(ParseError::Malformed(
                    "hypotheses are numbered from 1".into(),
                ));
            }
            Justification::Hypothesis(k - 1)
        }
        "axiom" => {
            let name = parse_name(ts)?;
            let binding = Binds::from_raw(parse_binds(ts)?);
            Justification::Axiom { name, binding }
        }
        "mp" => {
            let implication = parse_num(ts)?;
            let antecedent = parse_num(ts)?;
            if implication == 0 || antecedent == 0 {
                return Err(ParseError::Malformed("lines are numbered from 1".into()));
            }
            Justification::ModusPonens {
                implication: implication - 1,
                antecedent: antecedent - 1,
            }
        }
        "gen" => {
            let from = parse_num(ts)?;
            if from == 0 {
                return Err(ParseError::Malformed("lines are numbered from 1".into()));
            }
            let var = match ts.next_tok()? {
                Token::Ident(s) => s.clone(),
                other => return Err(ParseError::UnexpectedToken(other.to_string())),
            };
            Justification::Generalization {
                from: from - 1,
                var,
            }
        }
        "rule" => {
            let name = parse_name(ts)?;
            let mut premises = Vec::new();
            while let Some(Token::Num(_)) = ts.peek() {
                let n = parse_num(ts)?;
                if n == 0 {
                    return Err(ParseError::Malformed("lines are numbered from 1".into()));
                }
                premises.push(n - 1);
            }
            let binding = Binds::from_raw(parse_binds(ts)?);
            Justification::Rule {
                name,
                premises,
                binding,
            }
        }
        "lemma" => {
            let id = parse_name(ts)?;
            let binding = Binds::from_raw(parse_binds(ts)?);
            Justification::Lemma { id, binding }
        }
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    };
    ts.expect_end()?;
    Ok(just)
}

fn parse_meta_decl(ts: &mut TokenStream, metas: &mut MetaTable) -> Result<(), ParseError> {
    let name = match ts.next_tok()? {
        Token::Ident(s) => s.clone(),
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    };
    let mut arity = 0usize;
    if ts.peek() == Some(&Token::LParen) {
        ts.next_tok()?;
        arity = parse_num(ts)?;
        ts.expect(&Token::RParen)?;
    }
    ts.expect(&Token::Colon)?;
    let kind = match ts.next_tok()? {
        Token::Ident(s) => s.clone(),
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    };
    match kind.as_str() {
        "prob" => metas.declare_formula(name, Sort::Problem, arity),
        "prop" => metas.declare_formula(name, Sort::Proposition, arity),
        "term" => {
            if arity != 0 {
                return Err(ParseError::Malformed(
                    "term metavariables take no slots".into(),
                ));
            }
            metas.declare_term(name);
        }
        other => {
            return Err(ParseError::Malformed(format!(
                "metavariable kind must be prob, prop or term, not {other}"
            )))
        }
    }
    ts.expect_end()?;
    Ok(())
}

/// Parse a numbered proof line `n. <formula> by <justification>`.
fn parse_proof_line(
    ts: &mut TokenStream,
    expected_no: usize,
    sig: &Signature,
) -> Result<ProofLine, ParseError> {
    let n = parse_num(ts)?;
    if n != expected_no {
        return Err(ParseError::Malformed(format!(
            "expected line number {expected_no}, found {n}"
        )));
    }
    ts.expect(&Token::Dot)?;
    let surface = parse_surface_stream(ts)?;
    let (formula, _) = elaborate(&surface, sig)?;
    match ts.next_tok()? {
        Token::Ident(s) if s == "by" => {}
        other => return Err(ParseError::UnexpectedToken(other.to_string())),
    }
    let justification = parse_justification(ts)?;
    Ok(ProofLine {
        formula,
        justification,
    })
}

/// Parse one corpus entry file.
pub fn parse_entry(text: &str) -> Result<EntryFile, ScriptError> {
    let mut id = None;
    let mut calculus = None;
    let mut anchor = String::new();
    let mut metas = MetaTable::new();
    let mut statement: Option<(Vec<Formula>, Formula)> = None;
    let mut lines: Vec<ProofLine> = Vec::new();
    let mut in_proof = false;
    let mut done = false;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let stripped = raw.trim();
        if stripped.is_empty() || stripped.starts_with('#') {
            continue;
        }
        if done {
            return Err(at(lineno, "content after qed"));
        }
        if let Some(rest) = stripped.strip_prefix("anchor") {
            if !in_proof {
                anchor = rest.trim().to_string();
                continue;
            }
        }
        let toks = lex(stripped).map_err(|e| at(lineno, e))?;
        let mut ts = TokenStream::new(&toks);
        if in_proof {
            if ts.peek() == Some(&Token::Ident("qed".to_string())) {
                done = true;
                continue;
            }
            let sig = metas.as_signature();
            let line =
                parse_proof_line(&mut ts, lines.len() + 1, &sig).map_err(|e| at(lineno, e))?;
            lines.push(line);
            continue;
        }
        let head = match ts.next_tok().map_err(|e| at(lineno, e))? {
            Token::Ident(s) => s.clone(),
            other => return Err(at(lineno, format!("unexpected {other}"))),
        };
        match head.as_str() {
            "entry" => {
                id = Some(parse_name(&mut ts).map_err(|e| at(lineno, e))?);
                ts.expect_end().map_err(|e| at(lineno, e))?;
            }
            "calculus" => {
                calculus = Some(parse_calc_name(&mut ts).map_err(|e| at(lineno, e))?);
                ts.expect_end().map_err(|e| at(lineno, e))?;
            }
            "meta" => parse_meta_decl(&mut ts, &mut metas).map_err(|e| at(lineno, e))?,
            "law" => {
                let sig = metas.as_signature();
                let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect_end().map_err(|e| at(lineno, e))?;
                let (f, _) = elaborate(&surface, &sig).map_err(|e| at(lineno, e))?;
                statement = Some((Vec::new(), f));
            }
            "rule" => {
                let sig = metas.as_signature();
                let mut premises = Vec::new();
                loop {
                    let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                    let (f, _) = elaborate(&surface, &sig).map_err(|e| at(lineno, e))?;
                    premises.push(f);
                    match ts.next_tok().map_err(|e| at(lineno, e))? {
                        Token::Comma => continue,
                        Token::Turnstile => break,
                        other => return Err(at(lineno, format!("unexpected {other}"))),
                    }
                }
                let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect_end().map_err(|e| at(lineno, e))?;
                let (concl, _) = elaborate(&surface, &sig).map_err(|e| at(lineno, e))?;
                statement = Some((premises, concl));
            }
            "proof" => {
                ts.expect_end().map_err(|e| at(lineno, e))?;
                if statement.is_none() {
                    return Err(at(lineno, "proof before a law or rule statement"));
                }
                in_proof = true;
            }
            other => return Err(at(lineno, format!("unexpected keyword {other}"))),
        }
    }
    if !done {
        return Err(ScriptError::Other("missing qed".into()));
    }
    let id = id.ok_or_else(|| ScriptError::Other("missing entry header".into()))?;
    let calculus = calculus.ok_or_else(|| ScriptError::Other("missing calculus header".into()))?;
    let (premises, conclusion) =
        statement.ok_or_else(|| ScriptError::Other("missing statement".into()))?;
    Ok(EntryFile {
        id,
        calculus,
        anchor,
        metas,
        premises,
        conclusion,
        lines,
    })
}

/// Parse a theory file declaring an extension.
pub fn parse_theory(text: &str) -> Result<TheoryFile, ScriptError> {
    let mut name = None;
    let mut base = None;
    let mut metas = MetaTable::new();
    let mut axioms: Vec<(String, Schema)> = Vec::new();
    let mut rules: Vec<RuleSchema> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let stripped = raw.trim();
        if stripped.is_empty() || stripped.starts_with('#') {
            continue;
        }
        let toks = lex(stripped).map_err(|e| at(lineno, e))?;
        let mut ts = TokenStream::new(&toks);
        let head = match ts.next_tok().map_err(|e| at(lineno, e))? {
            Token::Ident(s) => s.clone(),
            other => return Err(at(lineno, format!("unexpected {other}"))),
        };
        match head.as_str() {
            "theory" => {
                name = Some(parse_calc_name(&mut ts).map_err(|e| at(lineno, e))?);
                ts.expect_end().map_err(|e| at(lineno, e))?;
            }
            "extends" => {
                base = Some(parse_calc_name(&mut ts).map_err(|e| at(lineno, e))?);
                ts.expect_end().map_err(|e| at(lineno, e))?;
            }
            "meta" => parse_meta_decl(&mut ts, &mut metas).map_err(|e| at(lineno, e))?,
            "axiom" => {
                let ax_name = parse_name(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect(&Token::Colon).map_err(|e| at(lineno, e))?;
                let sig = metas.as_signature();
                let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect_end().map_err(|e| at(lineno, e))?;
                let (f, _) = elaborate(&surface, &sig).map_err(|e| at(lineno, e))?;
                axioms.push((ax_name, Schema::new(metas.clone(), f)));
            }
            "rule" => {
                let rule_name = parse_name(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect(&Token::Colon).map_err(|e| at(lineno, e))?;
                let sig = metas.as_signature();
                let mut premises = Vec::new();
                loop {
                    let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                    let (f, _) = elaborate(&surface, &sig).map_err(|e| at(lineno, e))?;
                    premises.push(f);
                    match ts.next_tok().map_err(|e| at(lineno, e))? {
                        Token::Comma => continue,
                        Token::Turnstile => break,
                        other => return Err(at(lineno, format!("unexpected {other}"))),
                    }
                }
                let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect_end().map_err(|e| at(lineno, e))?;
                let (concl, _) = elaborate(&surface, &sig).map_err(|e| at(lineno, e))?;
                rules.push(RuleSchema {
                    name: rule_name,
                    metas: metas.clone(),
                    premises,
                    conclusion: concl,
                });
            }
            other => return Err(at(lineno, format!("unexpected keyword {other}"))),
        }
    }
    Ok(TheoryFile {
        name: name.ok_or_else(|| ScriptError::Other("missing theory header".into()))?,
        base: base.ok_or_else(|| ScriptError::Other("missing extends header".into()))?,
        axioms,
        rules,
    })
}

/// Parse a standalone proof script: `calculus` header, optional `prob`/
/// `prop` declarations, `hyp` lines, optional `goal`, then numbered lines.
pub fn parse_proof_script(text: &str) -> Result<Proof, ScriptError> {
    let mut calculus = None;
    let mut signature = Signature::new();
    let mut hypotheses = Vec::new();
    let mut goal: Option<Formula> = None;
    let mut lines: Vec<ProofLine> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let stripped = raw.trim();
        if stripped.is_empty() || stripped.starts_with('#') {
            continue;
        }
        let toks = lex(stripped).map_err(|e| at(lineno, e))?;
        let mut ts = TokenStream::new(&toks);
        match ts.peek() {
            Some(Token::Ident(s)) if s == "calculus" => {
                ts.next_tok().unwrap();
                calculus = Some(parse_calc_name(&mut ts).map_err(|e| at(lineno, e))?);
                ts.expect_end().map_err(|e| at(lineno, e))?;
            }
            Some(Token::Ident(s)) if s == "prob" || s == "prop" => {
                let part = crate::parser::parse_signature(stripped).map_err(|e| at(lineno, e))?;
                signature = signature.merged(&part).map_err(|e| at(lineno, e))?;
            }
            Some(Token::Ident(s)) if s == "hyp" => {
                ts.next_tok().unwrap();
                let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect_end().map_err(|e| at(lineno, e))?;
                let (f, _) = elaborate(&surface, &signature).map_err(|e| at(lineno, e))?;
                hypotheses.push(f);
            }
            Some(Token::Ident(s)) if s == "goal" => {
                ts.next_tok().unwrap();
                let surface = parse_surface_stream(&mut ts).map_err(|e| at(lineno, e))?;
                ts.expect_end().map_err(|e| at(lineno, e))?;
                let (f, _) = elaborate(&surface, &signature).map_err(|e| at(lineno, e))?;
                goal = Some(f);
            }
            Some(Token::Num(_)) => {
                let line = parse_proof_line(&mut ts, lines.len() + 1, &signature)
                    .map_err(|e| at(lineno, e))?;
                lines.push(line);
            }
            Some(other) => return Err(at(lineno, format!("unexpected {other}"))),
            None => {}
        }
    }
    let calculus = calculus.ok_or_else(|| ScriptError::Other("missing calculus header".into()))?;
    let goal = match goal {
        Some(g) => g,
        None => lines
            .last()
            .map(|l| l.formula.clone())
            .ok_or_else(|| ScriptError::Other("empty proof".into()))?,
    };
    Ok(Proof {
        calculus,
        signature,
        hypotheses,
        lines,
        goal,
    })
}
