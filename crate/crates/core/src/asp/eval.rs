use std::collections::{BTreeSet, HashMap, HashSet};

use super::{AspError, AspProgram, GAtom, Head, Rule};

/// Structural rank of every desire constant: 0 for literals and
/// occurrences, children plus one for connectives, unchanged for goal.
fn sigma(facts: &[&GAtom]) -> HashMap<String, usize> {
    let mut children: HashMap<&str, (bool, Vec<&str>)> = HashMap::new();
    for f in facts {
        let (Some(n), rest) = (f.args.first(), f.args.get(1..).unwrap_or(&[])) else {
            continue;
        };
        let rest: Vec<&str> = rest.iter().map(String::as_str).collect();
        match f.pred.as_str() {
            "and" | "or" | "until" | "negation" | "next" | "always" | "eventually" => {
                children.insert(n, (true, rest));
            }
            "goal" => {
                children.insert(n, (false, rest));
            }
            _ => {}
        }
    }
    fn rank<'a>(
        n: &'a str,
        children: &HashMap<&'a str, (bool, Vec<&'a str>)>,
        memo: &mut HashMap<String, usize>,
    ) -> usize {
        if let Some(&r) = memo.get(n) {
            return r;
        }
        let r = match children.get(n) {
            None => 0,
            Some((step, cs)) => {
                let m = cs
                    .iter()
                    .map(|c| rank(c, children, memo))
                    .max()
                    .unwrap_or(0);
                m + usize::from(*step)
            }
        };
        memo.insert(n.to_string(), r);
        r
    }
    let mut memo = HashMap::new();
    for n in children.keys() {
        rank(n, &children, &mut memo);
    }
    memo
}

/// Least model of the sat and weight fragment, evaluated stratum by
/// stratum with `satisfy` at `5σ+2`, `during` at `5σ+4`, weight atoms
/// above both and everything else at 0.
pub fn stratified_eval(program: &AspProgram, extra: &[GAtom]) -> Result<BTreeSet<GAtom>, AspError> {
    let facts: Vec<&GAtom> = program.facts.iter().chain(extra).collect();
    let sigma = sigma(&facts);
    let base = |a: &GAtom| -> Option<usize> {
        let s = a
            .args
            .first()
            .and_then(|n| sigma.get(n))
            .copied()
            .unwrap_or(0);
        match a.pred.as_str() {
            "satisfy" => Some(5 * s + 2),
            "during" => Some(5 * s + 4),
            _ => None,
        }
    };
    let top = program
        .rules
        .iter()
        .flat_map(|r| {
            let head = match &r.head {
                Head::Atom(h) => Some(h),
                _ => None,
            };
            head.into_iter()
                .chain(&r.pos)
                .chain(&r.neg)
                .filter_map(base)
        })
        .max()
        .unwrap_or(0)
        + 1;
    let level = |a: &GAtom| -> usize {
        match a.pred.as_str() {
            "w" | "max" => top,
            _ => base(a).unwrap_or(0),
        }
    };

    let mut strata: Vec<Vec<&Rule>> = vec![Vec::new(); top + 1];
    let mut constraints = Vec::new();
    for r in &program.rules {
        let h = match &r.head {
            Head::Atom(h) => h,
            Head::None => {
                constraints.push(r);
                continue;
            }
            Head::Choice(_) => {
                return Err(AspError::NotStratified {
                    rule: r.to_string(),
                })
            }
        };
        let lh = level(h);
        if r.pos.iter().any(|b| level(b) > lh) || r.neg.iter().any(|b| level(b) >= lh) {
            return Err(AspError::NotStratified {
                rule: r.to_string(),
            });
        }
        strata[lh].push(r);
    }

    let mut model: HashSet<GAtom> = facts.into_iter().cloned().collect();
    for rules in &strata {
        loop {
            let mut changed = false;
            for r in rules {
                let Head::Atom(h) = &r.head else {
                    unreachable!()
                };
                if model.contains(h) {
                    continue;
                }
                if r.pos.iter().all(|b| model.contains(b))
                    && !r.neg.iter().any(|b| model.contains(b))
                {
                    model.insert(h.clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    for c in constraints {
        if c.pos.iter().all(|b| model.contains(b)) && !c.neg.iter().any(|b| model.contains(b)) {
            return Err(AspError::ConstraintViolated {
                rule: c.to_string(),
            });
        }
    }
    Ok(model.into_iter().collect())
}

/// Least model of the reduct of `program` with respect to `m`. A choice
/// rule contributes its head when the head is in `m` and the body holds.
pub fn reduct_model(program: &AspProgram, m: &BTreeSet<GAtom>) -> BTreeSet<GAtom> {
    let active: Vec<&Rule> = program
        .rules
        .iter()
        .filter(|r| match &r.head {
            Head::Atom(_) => !r.neg.iter().any(|b| m.contains(b)),
            Head::Choice(h) => m.contains(h),
            Head::None => false,
        })
        .collect();
    let mut model: HashSet<GAtom> = program.facts.iter().cloned().collect();
    loop {
        let mut changed = false;
        for r in &active {
            let (Head::Atom(h) | Head::Choice(h)) = &r.head else {
                unreachable!()
            };
            if !model.contains(h) && r.pos.iter().all(|b| model.contains(b)) {
                model.insert(h.clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    model.into_iter().collect()
}

/// `m` is an answer set: it is the least model of its reduct and violates
/// no constraint.
pub fn is_answer_set(program: &AspProgram, m: &BTreeSet<GAtom>) -> bool {
    if reduct_model(program, m) != *m {
        return false;
    }
    !program.rules.iter().any(|r| {
        r.head == Head::None
            && r.pos.iter().all(|b| m.contains(b))
            && !r.neg.iter().any(|b| m.contains(b))
    })
}
