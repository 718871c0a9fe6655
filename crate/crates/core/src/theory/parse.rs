use super::{RuleDecl, Theory, TheoryError};
use crate::syntax::{FunctionSymbol, Formula, Parser, Signature, Tok, Var};
use crate::wd::is_total;

/// Reads a theory file:
///
/// ```text
/// theory card
/// sets S
/// metavariables i : INT; j : INT; a : POW(S)
/// functions
///   half(n : INT) : INT wd n >= 0 body n / 2;
/// rewrite
///   rule card_range: card(i..j) -> auto { i <= j : j - i + 1; i > j : 0 }
/// end
/// ```
///
/// Every section but `theory` and `end` is optional. A condition containing
/// a top-level membership must be parenthesised.
pub fn parse_theory(src: &str) -> Result<Theory, TheoryError> {
    let mut p = Parser::new(src)?;
    if !p.eat_keyword("theory") {
        return Err(p.error_here("expected `theory`").into());
    }
    let name = p.ident()?;
    let mut sig = Signature::new();
    let mut sets = Vec::new();
    if p.eat_keyword("sets") {
        loop {
            let at = p.error_here("");
            let s = p.ident()?;
            sig.add_set(s.clone()).map_err(|m| retag(at, m))?;
            sets.push(s);
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    let mut metavariables = Vec::new();
    if p.eat_keyword("metavariables") {
        loop {
            let at = p.error_here("");
            let v = p.ident()?;
            p.expect(Tok::Colon)?;
            let ty = p.ty()?;
            sig.check_type(&ty).map_err(|m| retag(at.clone(), m))?;
            if metavariables.iter().any(|m: &Var| m.name == v) {
                return Err(retag(at, format!("`{v}` is already declared")).into());
            }
            metavariables.push(Var::new(v, ty));
            if !(matches!(p.peek(), Tok::Semi) && matches!(p.peek_at(2), Tok::Colon)) {
                break;
            }
            p.bump();
        }
    }
    let mut functions = Vec::new();
    if p.eat_keyword("functions") {
        while !p.is_keyword("rewrite") && !p.is_keyword("end") {
            let f = function(&mut p, &sig)?;
            sig.add_function(f.clone()).map_err(|m| TheoryError::Decl(m))?;
            functions.push(f);
        }
    }
    let mut full = sig.clone();
    for v in &metavariables {
        full.add_variable(v.name.clone(), v.ty.clone())
            .map_err(TheoryError::Decl)?;
    }
    let mut rules = Vec::new();
    if p.eat_keyword("rewrite") {
        while p.eat_keyword("rule") {
            rules.push(rule(&mut p, &full)?);
        }
    }
    if !p.eat_keyword("end") {
        return Err(p.error_here(format!("expected `rule` or `end`, found {}", p.peek())).into());
    }
    p.expect_end()?;
    let theory = Theory {
        name,
        sets,
        metavariables,
        functions,
        rules,
    };
    let mut names = std::collections::BTreeSet::new();
    for r in &theory.rules {
        if !names.insert(r.name.as_str()) {
            return Err(TheoryError::Decl(format!("rule `{}` is declared twice", r.name)));
        }
    }
    theory.groups()?;
    Ok(theory)
}

fn retag(at: crate::syntax::ParseError, msg: String) -> crate::syntax::ParseError {
    match at {
        crate::syntax::ParseError::Syntax { line, col, .. } => crate::syntax::ParseError::Syntax { line, col, msg },
        other => other,
    }
}

fn function(p: &mut Parser<'_>, sig: &Signature) -> Result<FunctionSymbol, TheoryError> {
    let name = p.ident()?;
    p.expect(Tok::LParen)?;
    let mut local = sig.clone();
    let mut params = Vec::new();
    if !p.eat(&Tok::RParen) {
        loop {
            let at = p.error_here("");
            let v = p.ident()?;
            p.expect(Tok::Colon)?;
            let ty = p.ty()?;
            local.add_variable(v.clone(), ty.clone()).map_err(|m| retag(at, m))?;
            params.push(Var::new(v, ty));
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
        p.expect(Tok::RParen)?;
    }
    p.expect(Tok::Colon)?;
    let result = p.ty()?;
    sig.check_type(&result).map_err(TheoryError::Decl)?;
    let wd = if p.eat_keyword("wd") {
        p.formula(&local)?
    } else {
        Formula::True
    };
    if !is_total(&wd) {
        return Err(TheoryError::Decl(format!(
            "domain condition of `{name}` uses a partial function symbol"
        )));
    }
    let body = if p.eat_keyword("body") {
        let b = p.term_of(&local, Some(&result))?;
        if *b.ty() != result {
            return Err(TheoryError::Decl(format!(
                "body of `{name}` has type {}, expected {result}",
                b.ty()
            )));
        }
        Some(b)
    } else {
        None
    };
    p.expect(Tok::Semi)?;
    Ok(FunctionSymbol {
        name,
        params,
        result,
        wd,
        body,
    })
}

fn rule(p: &mut Parser<'_>, sig: &Signature) -> Result<RuleDecl, TheoryError> {
    let name = p.ident()?;
    p.expect(Tok::Colon)?;
    let lhs = p.term(sig)?;
    p.expect(Tok::Arrow)?;
    let auto = if p.eat_keyword("auto") {
        true
    } else if p.eat_keyword("manual") {
        false
    } else {
        return Err(p.error_here("expected `auto` or `manual`").into());
    };
    p.expect(Tok::LBrace)?;
    let mut cases = Vec::new();
    loop {
        let c = p.formula_before_colon(sig)?;
        p.expect(Tok::Colon)?;
        let r = p.term_of(sig, Some(lhs.ty()))?;
        cases.push((c, r));
        if !p.eat(&Tok::Semi) || matches!(p.peek(), Tok::RBrace) {
            break;
        }
    }
    p.expect(Tok::RBrace)?;
    Ok(RuleDecl {
        name,
        lhs,
        auto,
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::RuleError;

    const CARD: &str = "theory card
metavariables i : INT; j : INT
rewrite
  rule card_range: card(i..j) -> auto { i <= j : j - i + 1; i > j : 0 }
end
";

    #[test]
    fn reads_and_prints() {
        let t = parse_theory(CARD).unwrap();
        assert_eq!(t.rules.len(), 1);
        assert_eq!(t.to_string(), CARD);
    }

    #[test]
    fn groups_by_renamed_lhs() {
        let t = parse_theory(
            "theory g metavariables a : INT; b : INT; c : INT; d : INT rewrite
             rule lo: a / b -> manual { a = 0 : 0 }
             rule hi: c / d -> manual { d = 1 : c }
             rule other: a / a -> manual { true : 1 }
             end",
        )
        .unwrap();
        let gs = t.groups().unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[0].cases.len(), 2);
        assert_eq!(gs[0].cases[1].cond.to_string(), "b = 1");
        assert_eq!(gs[0].cases[1].rhs.to_string(), "a");
    }

    #[test]
    fn functions_and_membership_conditions() {
        let src = "theory f
sets S
metavariables x : S; s : POW(S); n : INT
functions
  half(m : INT) : INT wd m >= 0 body m / 2;
rewrite
  rule h: half(n) -> manual { n >= 0 : n / 2 }
  rule m: card(s \\/ {x}) -> manual { (x : s) : card(s) }
end
";
        let t = parse_theory(src).unwrap();
        assert_eq!(parse_theory(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_rules() {
        let bad = |body: &str| {
            parse_theory(&format!("theory t metavariables i : INT; j : INT rewrite rule r: {body} end"))
        };
        let var_lhs = bad("i -> auto { true : 0 }").unwrap().groups().unwrap();
        assert!(matches!(var_lhs[0].check_lhs(), Err(RuleError::LhsIsVariable(_))));
        assert!(matches!(
            bad("i + 1 -> auto { j = 0 : i }"),
            Err(TheoryError::Rule(RuleError::CondVars { .. }))
        ));
        assert!(matches!(
            bad("i + 1 -> auto { true : j }"),
            Err(TheoryError::Rule(RuleError::RhsVars { .. }))
        ));
        assert!(bad("i + 1 -> auto { true : {i} }").is_err());
    }
}
