//! Printing in the surface syntax accepted by the parser. Binary operators
//! are always parenthesized so the output re-parses to the same tree.

use super::{Desire, GeneralPreference};
use crate::theory::{ActionTheory, FluentFormula};

fn negate(inner: String) -> String {
    if inner.starts_with('!') {
        format!("!({inner})")
    } else {
        format!("!{inner}")
    }
}

fn formula(t: &ActionTheory, f: &FluentFormula) -> String {
    let join = |xs: &[FluentFormula], op: &str, empty: &str| -> String {
        match xs {
            [] => empty.to_string(),
            [x] => formula(t, x),
            _ => {
                let parts: Vec<String> = xs.iter().map(|x| formula(t, x)).collect();
                format!("({})", parts.join(op))
            }
        }
    };
    match f {
        FluentFormula::True => "true".into(),
        FluentFormula::False => "false".into(),
        FluentFormula::Lit(l) => t.literal_name(*l),
        FluentFormula::And(xs) => join(xs, " && ", "true"),
        FluentFormula::Or(xs) => join(xs, " || ", "false"),
        FluentFormula::Not(x) => negate(formula(t, x)),
    }
}

pub fn desire_to_string(t: &ActionTheory, d: &Desire) -> String {
    match d {
        Desire::Formula(f) => formula(t, f),
        Desire::Occ(a) => format!("occ({})", t.action(*a)),
        Desire::Goal(f) => format!("goal({})", formula(t, f)),
        Desire::And(a, b) => format!("({} && {})", desire_to_string(t, a), desire_to_string(t, b)),
        Desire::Or(a, b) => format!("({} || {})", desire_to_string(t, a), desire_to_string(t, b)),
        Desire::Not(a) => negate(desire_to_string(t, a)),
        Desire::Next(a) => format!("next({})", desire_to_string(t, a)),
        Desire::Until(a, b) => format!(
            "until({}, {})",
            desire_to_string(t, a),
            desire_to_string(t, b)
        ),
        Desire::Always(a) => format!("always({})", desire_to_string(t, a)),
        Desire::Eventually(a) => format!("eventually({})", desire_to_string(t, a)),
    }
}

pub fn preference_to_string(t: &ActionTheory, p: &GeneralPreference) -> String {
    match p {
        GeneralPreference::Atomic(a) if a.chain.len() == 1 => desire_to_string(t, &a.chain[0]),
        GeneralPreference::Atomic(a) => {
            let parts: Vec<String> = a.chain.iter().map(|d| desire_to_string(t, d)).collect();
            format!("({})", parts.join(" <| "))
        }
        GeneralPreference::Conj(a, b) => {
            format!(
                "({} & {})",
                preference_to_string(t, a),
                preference_to_string(t, b)
            )
        }
        GeneralPreference::Disj(a, b) => {
            format!(
                "({} | {})",
                preference_to_string(t, a),
                preference_to_string(t, b)
            )
        }
        GeneralPreference::Neg(a) => format!("!!({})", preference_to_string(t, a)),
        GeneralPreference::Chain(xs) => {
            let parts: Vec<String> = xs.iter().map(|x| preference_to_string(t, x)).collect();
            format!("({})", parts.join(" <| "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_pref_expr;
    use super::*;
    use crate::theory::domain::load_domain;

    #[test]
    fn round_trip_examples() {
        let t = load_domain("fluent p, q, r. action a, b. a executable_if p.").unwrap();
        for src in [
            "p",
            "-p",
            "!!p & q",
            "!!(!!p)",
            "!!p <| q",
            "(p <| q) | r",
            "always(!!p)",
            "!(!p) && next(occ(a))",
            "until(p || -q, goal(r)) <| eventually(occ(b))",
            "true && false",
        ] {
            if src == "always(!!p)" {
                assert!(parse_pref_expr(&t, src).is_err());
                continue;
            }
            let p = parse_pref_expr(&t, src).unwrap();
            let printed = preference_to_string(&t, &p);
            assert_eq!(
                parse_pref_expr(&t, &printed).unwrap(),
                p,
                "{src} -> {printed}"
            );
        }
    }
}
