use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{StateFn, Ultras, UltrasError};
use crate::weights::{MonoidId, Weight};

/// `{monoid, labels, states, trans: [{src, label, fns: [[{tgt, w}]]}]}`, one
/// `trans` entry per (state, label) pair; an empty `fns` list means stuck.
pub fn to_json<W: Weight>(u: &Ultras<W>) -> String {
    let mut trans = vec![];
    for x in 0..u.num_states() {
        for (a, label) in u.labels().iter().enumerate() {
            let fns: Vec<Value> = u
                .row(x, a)
                .iter()
                .map(|f| Value::Array(f.iter().map(|(k, w)| json!({"tgt": k, "w": w.to_string()})).collect()))
                .collect();
            trans.push(json!({"src": x, "label": label, "fns": fns}));
        }
    }
    let doc = json!({
        "monoid": u.monoid().name(),
        "labels": u.labels(),
        "states": u.states(),
        "trans": trans,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn from_json<W: Weight>(text: &str) -> Result<Ultras<W>, UltrasError> {
    let bad = |m: &str| UltrasError::Format(m.to_string());
    let doc: Value = serde_json::from_str(text).map_err(|e| UltrasError::Format(e.to_string()))?;
    let monoid = doc["monoid"].as_str().and_then(MonoidId::from_name).ok_or_else(|| bad("missing or unknown monoid"))?;
    if monoid != W::MONOID.id {
        return Err(UltrasError::Format(format!("expected monoid {}, found {monoid}", W::MONOID.id)));
    }
    let strings = |v: &Value, what: &str| -> Result<Vec<String>, UltrasError> {
        v.as_array()
            .ok_or_else(|| bad(what))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad(what)))
            .collect()
    };
    let labels = strings(&doc["labels"], "labels must be a list of strings")?;
    let states = strings(&doc["states"], "states must be a list of strings")?;
    let mut u = Ultras::new(labels, states);
    for entry in doc["trans"].as_array().ok_or_else(|| bad("trans must be a list"))? {
        let src = entry["src"].as_u64().ok_or_else(|| bad("src must be a state index"))? as usize;
        let label = entry["label"].as_str().ok_or_else(|| bad("label must be a string"))?;
        let a = u.label_index(label).ok_or_else(|| UltrasError::UnknownLabel(label.to_string()))?;
        let mut fns = vec![];
        for f in entry["fns"].as_array().ok_or_else(|| bad("fns must be a list"))? {
            let mut out = StateFn::zero();
            for point in f.as_array().ok_or_else(|| bad("a weight function must be a list"))? {
                let tgt = point["tgt"].as_u64().ok_or_else(|| bad("tgt must be a state index"))? as usize;
                let w = point["w"].as_str().ok_or_else(|| bad("w must be a string"))?;
                let w = W::parse_weight(w).map_err(|e| UltrasError::Format(e.to_string()))?;
                out.add_at(tgt, w);
            }
            fns.push(out);
        }
        if src >= u.num_states() {
            return Err(UltrasError::UnknownState(src));
        }
        let mut row = u.row(src, a).to_vec();
        row.extend(fns);
        u.set_row(src, a, row)?;
    }
    Ok(u)
}

/// Graphviz rendering with one intermediate node per weight function.
pub fn to_dot<W: Weight>(u: &Ultras<W>) -> String {
    let mut s = String::from("digraph ultras {\n  rankdir=LR;\n");
    for (i, name) in u.states().iter().enumerate() {
        let _ = writeln!(s, "  s{i} [label=\"{}\"];", escape(name));
    }
    for x in 0..u.num_states() {
        for (a, label) in u.labels().iter().enumerate() {
            for (j, f) in u.row(x, a).iter().enumerate() {
                let node = format!("f{x}_{a}_{j}");
                let _ = writeln!(s, "  {node} [shape=point];");
                let _ = writeln!(s, "  s{x} -> {node} [label=\"{}\"];", escape(label));
                for (y, w) in f.iter() {
                    let _ = writeln!(s, "  {node} -> s{y} [label=\"{}; {w}\"];", escape(label));
                }
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Plain listing: one line per state, then one line per (state, label) row.
pub fn to_text<W: Weight>(u: &Ultras<W>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "monoid {}", u.monoid());
    let _ = writeln!(s, "labels {}", u.labels().join(", "));
    for (i, name) in u.states().iter().enumerate() {
        let _ = writeln!(s, "s{i} = {name}");
    }
    for x in 0..u.num_states() {
        for (a, label) in u.labels().iter().enumerate() {
            let row = u.row(x, a);
            if row.is_empty() {
                let _ = writeln!(s, "s{x} --{label}--> stuck");
            }
            for f in row {
                let pts: Vec<String> = f.iter().map(|(y, w)| format!("s{y}: {w}")).collect();
                let _ = writeln!(s, "s{x} --{label}--> {{{}}}", pts.join(", "));
            }
        }
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{ExtRational, Rational};

    fn sample() -> Ultras<ExtRational> {
        let mut u = Ultras::new(vec!["a".into(), "b".into()], vec!["p".into(), "nil".into()]);
        let w = |s: &str| ExtRational::parse_weight(s).unwrap();
        u.set_row(0, 0, [[(1, w("1/2"))].into_iter().collect(), [(0, w("inf")), (1, w("2"))].into_iter().collect()]).unwrap();
        u.set_row(0, 1, [StateFn::zero()]).unwrap();
        u
    }

    #[test]
    fn json_round_trip() {
        let u = sample();
        let text = to_json(&u);
        let back: Ultras<ExtRational> = from_json(&text).unwrap();
        assert_eq!(back, u);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn json_rejects_other_monoids() {
        let text = to_json(&sample());
        assert!(from_json::<Rational>(&text).is_err());
        assert!(from_json::<Rational>("{").is_err());
    }

    #[test]
    fn dot_has_intermediate_nodes() {
        let dot = to_dot(&sample());
        assert!(dot.contains("f0_0_0 [shape=point]"));
        assert!(dot.contains("s0 -> f0_0_1 [label=\"a\"]"));
        assert!(dot.contains("-> s1 [label=\"a; 2\"]"));
    }

    #[test]
    fn text_marks_stuck_rows() {
        let t = to_text(&sample());
        assert!(t.contains("s1 --a--> stuck"));
        assert!(t.contains("s0 --b--> {}"));
    }
}
