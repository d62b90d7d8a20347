//! Pretty printing. Folds `~` and `<->` back from their expansions; the
//! modal style additionally folds `?!` / `!?` into `box` / `nabla`.

use crate::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// `?`/`!` spelled out.
    Plain,
    /// `?!p` printed as `box p`, `!?a` as `nabla a`.
    Modal,
}

pub fn pretty(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 0, Style::Plain, &mut out);
    out
}

pub fn pretty_modal(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 0, Style::Modal, &mut out);
    out
}

// Precedence levels: 0 iff, 1 imp, 2 or, 3 and, 4 unary/atom.
fn write_at(f: &Formula, level: u8, style: Style, out: &mut String) {
    // abbreviation folding first
    if let Formula::And(l, r) = f {
        if let (Formula::Imp(a, b), Formula::Imp(b2, a2)) = (l.as_ref(), r.as_ref()) {
            if a == a2 && b == b2 {
                let need = level > 0;
                if need {
                    out.push('(');
                }
                write_at(a, 1, style, out);
                out.push_str(" <-> ");
                write_at(b, 1, style, out);
                if need {
                    out.push(')');
                }
                return;
            }
        }
    }
    if let Formula::Imp(l, r) = f {
        if matches!(r.as_ref(), Formula::FalseC | Formula::FalseI) {
            out.push('~');
            write_at(l, 4, style, out);
            return;
        }
    }
    if style == Style::Modal {
        if let Formula::Wn(inner) = f {
            if let Formula::Oc(p) = inner.as_ref() {
                out.push_str("box ");
                write_at(p, 4, style, out);
                return;
            }
        }
        if let Formula::Oc(inner) = f {
            if let Formula::Wn(a) = inner.as_ref() {
                out.push_str("nabla ");
                write_at(a, 4, style, out);
                return;
            }
        }
    }
    match f {
        Formula::Atom(name, args) => {
            out.push_str(name);
            if !args.is_empty() {
                out.push('(');
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&t.0);
                }
                out.push(')');
            }
        }
        Formula::FalseC => out.push('0'),
        Formula::FalseI => out.push_str("bot"),
        Formula::And(l, r) => {
            let need = level > 3;
            if need {
                out.push('(');
            }
            write_at(l, 3, style, out);
            out.push_str(" & ");
            write_at(r, 4, style, out);
            if need {
                out.push(')');
            }
        }
        Formula::Or(l, r) => {
            let need = level > 2;
            if need {
                out.push('(');
            }
            write_at(l, 2, style, out);
            out.push_str(" | ");
            write_at(r, 3, style, out);
            if need {
                out.push(')');
            }
        }
        Formula::Imp(l, r) => {
            let need = level > 1;
            if need {
                out.push('(');
            }
            write_at(l, 2, style, out);
            out.push_str(" -> ");
            write_at(r, 1, style, out);
            if need {
                out.push(')');
            }
        }
        Formula::Forall(v, b) => {
            out.push_str("forall ");
            out.push_str(v);
            out.push_str(". ");
            write_at(b, 4, style, out);
        }
        Formula::Exists(v, b) => {
            out.push_str("exists ");
            out.push_str(v);
            out.push_str(". ");
            write_at(b, 4, style, out);
        }
        Formula::Wn(g) => {
            out.push('?');
            write_at(g, 4, style, out);
        }
        Formula::Oc(g) => {
            out.push('!');
            write_at(g, 4, style, out);
        }
    }
}
