use std::fmt::Write;

use num_bigint::BigInt;

use super::model::{Cmp, IlpModel, Sense, VarKind};

const TERMS_PER_LINE: usize = 8;

fn push_terms<C: std::fmt::Display>(out: &mut String, terms: impl Iterator<Item = (String, C, bool)>) {
    let mut any = false;
    for (i, (name, magnitude, negative)) in terms.enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = match (i, negative) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => " +",
            (_, true) => " -",
        };
        let sep = if i == 0 && !negative { "" } else { " " };
        let coef = magnitude.to_string();
        if coef == "1" {
            let _ = write!(out, "{sign}{sep}{name}");
        } else {
            let _ = write!(out, "{sign}{sep}{coef} {name}");
        }
        any = true;
    }
    if !any {
        out.push('0');
    }
}

/// LP-format text of `model`. Node and set indices in variable names are
/// mapped back to ids by comment lines at the top.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ interdep-route {} model", model.kind.label());
    for (i, id) in model.node_ids.iter().enumerate() {
        let _ = writeln!(out, "\\ node {i} = {id:?}");
    }
    for (i, set) in model.hit_sets.iter().enumerate() {
        let _ = writeln!(out, "\\ set {i} = {set:?}");
    }
    if let Some(m) = model.big_m {
        let _ = writeln!(out, "\\ big M = {m}");
    }
    for (l, w) in &model.weights {
        let _ = writeln!(out, "\\ w({l}) = {w}");
    }
    out.push_str(match model.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj: ");
    let zero = BigInt::default();
    push_terms(
        &mut out,
        model
            .objective
            .iter()
            .map(|(v, c)| (model.variables[*v].name(), c.magnitude().clone(), c < &zero)),
    );
    out.push('\n');
    if !model.rows.is_empty() {
        out.push_str("Subject To\n");
        for (r, row) in model.rows.iter().enumerate() {
            let _ = write!(out, " c{r}: ");
            push_terms(
                &mut out,
                row.terms
                    .iter()
                    .map(|&(v, c)| (model.variables[v].name(), c.unsigned_abs(), c < 0)),
            );
            let cmp = match row.cmp {
                Cmp::Le => "<=",
                Cmp::Ge => ">=",
                Cmp::Eq => "=",
            };
            let _ = writeln!(out, " {cmp} {}", row.rhs);
        }
    }
    let general: Vec<_> = model
        .variables
        .iter()
        .filter_map(|v| match v.kind {
            VarKind::Integer { lo, hi } => Some((v.name(), lo, hi)),
            VarKind::Binary => None,
        })
        .collect();
    if !general.is_empty() {
        out.push_str("Bounds\n");
        for (name, lo, hi) in &general {
            let _ = writeln!(out, " {lo} <= {name} <= {hi}");
        }
    }
    let binary: Vec<String> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name())
        .collect();
    for (section, names) in [("Binary", binary), ("General", general.into_iter().map(|g| g.0).collect())] {
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{section}");
        for chunk in names.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}
