//! Step classification: the one step that commits a simulation versus the
//! administrative steps around it.

use thiserror::Error;

use super::barbs::lock_instantiation;
use super::StepClass;
use crate::semantics::{RedexDescriptor, Rule, State, StateGraph};
use crate::term::{Role, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("redex positions do not match the state")]
    BadPosition,
}

fn split_par<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
    match t {
        Term::Par(a, b) => {
            split_par(a, out);
            split_par(b, out);
        }
        Term::Nil => {}
        t => out.push(t),
    }
}

/// `new t,f.(l!<t,f> | t?().P | f?().Q)` with `l` a sum lock, and nothing else.
pub fn is_test(t: &Term) -> bool {
    let mut body = t;
    let mut bound = 0;
    while let Term::Restrict(_, p) = body {
        bound += 1;
        body = p;
    }
    let mut parts = Vec::new();
    split_par(body, &mut parts);
    if bound != 2 || parts.len() != 3 {
        return false;
    }
    let lock_out = parts
        .iter()
        .filter(|p| matches!(p, Term::Output(ch, args, _) if args.len() == 2 && ch.first.role() == Role::SumLock))
        .count();
    let branches = parts.iter().filter(|p| matches!(p, Term::Input(_, xs, _) if xs.is_empty())).count();
    lock_out == 1 && branches == 2
}

/// Classify one step of a role-tagged target state.
pub fn classify_step(state: &State, redex: &RedexDescriptor) -> Result<StepClass, ClassifyError> {
    let Some(ch) = redex.channel else { return Ok(StepClass::PureAdmin) };
    if redex.rule == Rule::Com && !ch.is_composed() && ch.first.role() == Role::SumLock {
        let [i, o] = redex.positions[..] else { return Err(ClassifyError::BadPosition) };
        if i.component >= state.comps.len() || o.component >= state.comps.len() {
            return Err(ClassifyError::BadPosition);
        }
        let positive = lock_instantiation(state.guard(i)) == Some((ch.first, true));
        if let (true, Term::Output(_, args, _)) = (positive, state.guard(o)) {
            // The first test of a nested test continues with another test.
            let nested = args.first().is_some_and(|t| {
                state.comps.iter().any(|c| matches!(&**c, Term::Input(g, xs, body)
                    if !g.is_composed() && g.first == *t && xs.is_empty() && is_test(body)))
            });
            if !nested {
                return Ok(StepClass::NonAdmin);
            }
        }
    }
    if ch.parts().any(|n| matches!(n.role(), Role::SumLock | Role::TranslatedSource)) {
        Ok(StepClass::ImpureAdmin)
    } else {
        Ok(StepClass::PureAdmin)
    }
}

/// Class of every edge of a graph, in edge order.
pub fn classify_graph(g: &StateGraph) -> Vec<StepClass> {
    g.edges
        .iter()
        .map(|e| classify_step(&g.states[e.from as usize], &e.redex).unwrap_or(StepClass::ImpureAdmin))
        .collect()
}
