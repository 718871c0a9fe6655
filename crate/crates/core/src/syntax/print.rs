//! Canonical ASCII printing. The output re-parses to the same AST; empty
//! sets are annotated with `oftype` unless the surrounding operator fixes
//! their type.

use std::fmt;

use super::ast::{Formula, Op, Pred, Term};

#[derive(Clone, Copy, PartialEq)]
enum Assoc {
    Left,
    Right,
    Non,
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

const ATOM: u8 = 12;

fn term_prec(t: &Term) -> (u8, Assoc) {
    match t {
        Term::App { op, .. } => match op {
            Op::Maplet => (7, Assoc::Left),
            Op::Union | Op::Inter | Op::Diff | Op::Ovl => (8, Assoc::Left),
            Op::Range => (9, Assoc::Non),
            Op::Add | Op::Sub => (10, Assoc::Left),
            Op::Mul | Op::Div => (11, Assoc::Left),
            _ => (ATOM, Assoc::Non),
        },
        _ => (ATOM, Assoc::Non),
    }
}

fn needs_parens(child: u8, parent: u8, assoc: Assoc, side: Side) -> bool {
    child < parent
        || (child == parent
            && !matches!((assoc, side), (Assoc::Left, Side::Left) | (Assoc::Right, Side::Right)))
}

/// Terms whose type the parser cannot infer without context when printed
/// with bare `{}`.
fn is_empty_set(t: &Term) -> bool {
    match t {
        Term::App { op: Op::Empty, .. } => true,
        Term::App { op: Op::Enum, args, .. } => args.iter().all(is_empty_set),
        Term::App {
            op: Op::Union | Op::Inter | Op::Diff | Op::Ovl,
            args,
            ..
        } => args.iter().all(is_empty_set),
        Term::App { op: Op::Maplet, args, .. } => args.iter().any(is_empty_set),
        _ => false,
    }
}

fn binary_op_symbol(op: &Op) -> Option<&'static str> {
    Some(match op {
        Op::Add => "+",
        Op::Sub => "-",
        Op::Mul => "*",
        Op::Div => "/",
        Op::Range => "..",
        Op::Union => "\\/",
        Op::Inter => "/\\",
        Op::Diff => "\\",
        Op::Ovl => "ovl",
        Op::Maplet => "|->",
        _ => return None,
    })
}

pub(crate) fn write_term(out: &mut String, t: &Term, fixed: bool) {
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Int(i) => out.push_str(&i.to_string()),
        Term::App { op, args, ty } => {
            if let Some(sym) = binary_op_symbol(op) {
                let (prec, assoc) = term_prec(t);
                let symmetric = matches!(op, Op::Union | Op::Inter | Op::Diff | Op::Ovl);
                let maplet = *op == Op::Maplet;
                let fix_l = (symmetric || maplet) && fixed || symmetric && !is_empty_set(&args[1]);
                let fix_r = (symmetric || maplet) && fixed || symmetric && !is_empty_set(&args[0]);
                write_term_child(out, &args[0], prec, assoc, Side::Left, fix_l);
                if *op == Op::Range {
                    out.push_str(sym);
                } else {
                    out.push(' ');
                    out.push_str(sym);
                    out.push(' ');
                }
                write_term_child(out, &args[1], prec, assoc, Side::Right, fix_r);
                return;
            }
            match op {
                Op::Empty => {
                    out.push_str("{}");
                    if !fixed {
                        out.push_str(" oftype ");
                        out.push_str(&ty.to_string());
                    }
                }
                Op::Enum => {
                    out.push('{');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        let fix = fixed
                            || args
                                .iter()
                                .enumerate()
                                .any(|(j, b)| j != i && !is_empty_set(b));
                        write_term(out, a, fix);
                    }
                    out.push('}');
                }
                Op::Apply => {
                    write_term_child(out, &args[0], ATOM, Assoc::Non, Side::Left, false);
                    out.push('(');
                    write_term(out, &args[1], true);
                    out.push(')');
                }
                Op::Card | Op::Dom | Op::Ran => {
                    out.push_str(op.name());
                    out.push('(');
                    write_term(out, &args[0], false);
                    out.push(')');
                }
                Op::User(f) => {
                    out.push_str(&f.name);
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_term(out, a, true);
                    }
                    out.push(')');
                }
                _ => unreachable!("binary operators handled above"),
            }
        }
    }
}

fn write_term_child(out: &mut String, t: &Term, parent: u8, assoc: Assoc, side: Side, fixed: bool) {
    let (prec, _) = term_prec(t);
    if needs_parens(prec, parent, assoc, side) {
        out.push('(');
        write_term(out, t, fixed);
        out.push(')');
    } else {
        write_term(out, t, fixed);
    }
}

fn formula_prec(f: &Formula) -> (u8, Assoc) {
    match f {
        Formula::Iff(..) => (1, Assoc::Left),
        Formula::Implies(..) => (2, Assoc::Right),
        Formula::Or(..) => (3, Assoc::Left),
        Formula::And(..) => (4, Assoc::Left),
        Formula::Not(g) if negated_relation(g).is_some() => (6, Assoc::Non),
        Formula::Not(_) => (5, Assoc::Non),
        Formula::Forall(..) | Formula::Exists(..) => (0, Assoc::Non),
        _ => (6, Assoc::Non),
    }
}

fn negated_relation(f: &Formula) -> Option<(&'static str, &Term, &Term)> {
    match f {
        Formula::Eq(a, b) => Some(("/=", a, b)),
        Formula::Pred(Pred::Mem, args) => Some(("/:", &args[0], &args[1])),
        _ => None,
    }
}

fn write_relation(out: &mut String, sym: &str, a: &Term, b: &Term, symmetric: bool) {
    let fix_a = symmetric && !is_empty_set(b);
    let fix_b = symmetric && !is_empty_set(a);
    write_term(out, a, fix_a);
    out.push(' ');
    out.push_str(sym);
    out.push(' ');
    write_term(out, b, fix_b);
}

pub(crate) fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::False => out.push_str("false"),
        Formula::True => out.push_str("true"),
        Formula::Eq(a, b) => write_relation(out, "=", a, b, true),
        Formula::Pred(p, args) => match p {
            Pred::Finite | Pred::Functional => {
                out.push_str(if *p == Pred::Finite { "finite(" } else { "functional(" });
                write_term(out, &args[0], false);
                out.push(')');
            }
            Pred::Lt => write_relation(out, "<", &args[0], &args[1], false),
            Pred::Le => write_relation(out, "<=", &args[0], &args[1], false),
            Pred::Gt => write_relation(out, ">", &args[0], &args[1], false),
            Pred::Ge => write_relation(out, ">=", &args[0], &args[1], false),
            Pred::Mem => write_relation(out, ":", &args[0], &args[1], true),
            Pred::Subset => write_relation(out, "<:", &args[0], &args[1], true),
        },
        Formula::Not(g) => {
            if let Some((sym, a, b)) = negated_relation(g) {
                write_relation(out, sym, a, b, true);
            } else {
                out.push_str("not ");
                write_formula_child(out, g, 5, Assoc::Non, Side::Right);
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let sym = match f {
                Formula::And(..) => "&",
                Formula::Or(..) => "or",
                Formula::Implies(..) => "=>",
                _ => "<=>",
            };
            let (prec, assoc) = formula_prec(f);
            write_formula_child(out, a, prec, assoc, Side::Left);
            out.push(' ');
            out.push_str(sym);
            out.push(' ');
            write_formula_child(out, b, prec, assoc, Side::Right);
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            out.push(if matches!(f, Formula::Forall(..)) { '!' } else { '#' });
            out.push_str(&v.name);
            out.push(':');
            out.push_str(&v.ty.to_string());
            out.push_str(". ");
            write_formula(out, body);
        }
    }
}

fn write_formula_child(out: &mut String, f: &Formula, parent: u8, assoc: Assoc, side: Side) {
    let (prec, _) = formula_prec(f);
    // `not` is prefix: only a lower-precedence operand needs parentheses.
    let parens = if parent == 5 {
        prec < 5
    } else {
        needs_parens(prec, parent, assoc, side)
    };
    if parens {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, false);
        f.write_str(&s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for super::ast::Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            super::ast::Expr::Formula(g) => g.fmt(f),
            super::ast::Expr::Term(t) => t.fmt(f),
        }
    }
}
